#include "kref/instances.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kref/csp.hpp"
#include "kref/rng.hpp"
#include "json.hpp"

namespace kref {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
    throw std::runtime_error("parse error at line " + std::to_string(line) + ": " + msg);
}

/// Decimal digit string -> Int (no octal/hex prefixes, unlike cpp_int's
/// string constructor).
Int parse_digits(const std::string& s, std::size_t line) {
    if (s.empty()) return Int(0);
    Int v(0);
    for (char c : s) {
        if (c < '0' || c > '9') parse_fail(line, "bad digit '" + std::string(1, c) + "'");
        v = v * 10 + (c - '0');
    }
    return v;
}

Int parse_signed(const std::string& s, std::size_t line) {
    if (s.empty()) parse_fail(line, "empty number");
    if (s[0] == '+') return parse_digits(s.substr(1), line);
    if (s[0] == '-') return -parse_digits(s.substr(1), line);
    return parse_digits(s, line);
}

Rat parse_coeff(const std::string& tok, std::size_t line) {
    auto slash = tok.find('/');
    if (slash != std::string::npos) {
        Int num = parse_signed(tok.substr(0, slash), line);
        Int den = parse_digits(tok.substr(slash + 1), line);
        if (den <= 0) parse_fail(line, "nonpositive denominator");
        return Rat(num, den);
    }
    auto dot = tok.find('.');
    if (dot != std::string::npos) {
        std::string head = tok.substr(0, dot), tail = tok.substr(dot + 1);
        bool neg = !head.empty() && head[0] == '-';
        if (!head.empty() && (head[0] == '+' || head[0] == '-')) head.erase(0, 1);
        Int num = parse_digits(head, line) * ipow(10, static_cast<long>(tail.size())) +
                  parse_digits(tail, line);
        Rat r(num, ipow(10, static_cast<long>(tail.size())));
        return neg ? -r : r;
    }
    return Rat(parse_signed(tok, line));
}

std::string coeff_to_string(const Rat& r) {
    Int num = numerator(r), den = denominator(r);
    if (den == 1) {
        std::string s = num.str();
        if (num >= 0) s.insert(s.begin(), '+');
        return s;
    }
    // terminating decimal when den = 2^a 5^b
    Int d = den;
    long a = 0, b = 0;
    while (d % 2 == 0) { d /= 2; ++a; }
    while (d % 5 == 0) { d /= 5; ++b; }
    if (d == 1) {
        long digits = std::max(a, b);
        Int scaled = num * ipow(10, digits) / den;
        bool neg = scaled < 0;
        std::string body = (neg ? -scaled : scaled).str();
        if (static_cast<long>(body.size()) <= digits) body.insert(0, digits + 1 - body.size(), '0');
        body.insert(body.size() - digits, ".");
        return (neg ? "-" : "") + body;
    }
    return num.str() + "/" + den.str();
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

json rat_to_json(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace

Hypergraph XorInstance::hypergraph() const {
    Hypergraph h{n, k, clauses};
    return h;
}

void XorInstance::validate() const {
    if (k < 1 || n < k) throw std::invalid_argument("XorInstance: need 1 <= k <= n");
    if (coeffs.size() != clauses.size()) throw std::invalid_argument("XorInstance: |coeffs| != m");
    hypergraph().validate();
    for (const auto& b : coeffs)
        if (b < -1 || b > 1) throw std::invalid_argument("XorInstance: coefficient outside [-1,1]");
}

void Predicate::validate() const {
    if (k < 1 || k > 20) throw std::invalid_argument("Predicate: unsupported arity");
    if (truth_table.size() != (std::size_t(1) << k)) throw std::invalid_argument("Predicate: truth table size");
    if (!fourier.empty()) {
        auto expect = fourier_expansion(*this);
        if (expect != fourier) throw std::invalid_argument("Predicate: stored Fourier expansion is wrong");
    }
}

void CspInstance::validate() const {
    if (predicate.k != k) throw std::invalid_argument("CspInstance: predicate arity mismatch");
    if (literals.size() != scopes.size()) throw std::invalid_argument("CspInstance: |literals| != m");
    for (std::size_t c = 0; c < scopes.size(); ++c) {
        const auto& s = scopes[c];
        if (static_cast<int>(s.size()) != k) throw std::invalid_argument("CspInstance: scope arity mismatch");
        std::set<int> distinct(s.begin(), s.end());
        if (static_cast<int>(distinct.size()) != k) throw std::invalid_argument("CspInstance: repeated scope entry");
        for (int v : s)
            if (v < 1 || v > n) throw std::invalid_argument("CspInstance: variable out of range");
        if (static_cast<int>(literals[c].size()) != k) throw std::invalid_argument("CspInstance: literal arity mismatch");
        for (int x : literals[c])
            if (x != 1 && x != -1) throw std::invalid_argument("CspInstance: literal not +-1");
    }
}

XorInstance gen_random_xor(int n, int k, int m, std::uint64_t seed, CoeffDist dist) {
    if (k < 2 || k > n) throw std::invalid_argument("gen_random_xor: need 2 <= k <= n");
    if (m < 0) throw std::invalid_argument("gen_random_xor: negative m");
    Rng rng(seed);
    XorInstance inst;
    inst.n = n;
    inst.k = k;
    inst.clauses.reserve(m);
    inst.coeffs.reserve(m);
    for (int i = 0; i < m; ++i) {
        inst.clauses.push_back(rng.subset(n, k));
        if (dist == CoeffDist::PlusMinusOne) {
            inst.coeffs.emplace_back(rng.sign());
        } else {
            // uniform on the dyadic grid j/2^12, j in [-2^12, 2^12]
            const std::int64_t denom = 1 << 12;
            std::int64_t j = static_cast<std::int64_t>(rng.below(2 * denom + 1)) - denom;
            inst.coeffs.emplace_back(Rat(Int(j), Int(denom)));
        }
    }
    return inst;
}

CspInstance gen_random_csp(int n, int m, const Predicate& p, std::uint64_t seed) {
    if (p.k < 1 || p.k > n) throw std::invalid_argument("gen_random_csp: need 1 <= k <= n");
    Rng rng(seed);
    CspInstance inst;
    inst.n = n;
    inst.k = p.k;
    inst.predicate = p;
    for (int i = 0; i < m; ++i) {
        inst.scopes.push_back(rng.tuple_distinct(n, p.k));
        std::vector<int> lits(p.k);
        for (auto& x : lits) x = rng.sign();
        inst.literals.push_back(std::move(lits));
    }
    return inst;
}

SmoothResult smooth_csp(const CspInstance& inst, const SmoothingPlan& plan) {
    if (plan.probabilities.size() != inst.m())
        throw std::invalid_argument("smooth_csp: plan does not cover every clause");
    for (std::size_t c = 0; c < inst.m(); ++c) {
        if (plan.probabilities[c].size() != static_cast<std::size_t>(inst.k))
            throw std::invalid_argument("smooth_csp: plan misses a literal position");
        for (double p : plan.probabilities[c])
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("smooth_csp: probability outside [0,1]");
    }
    Rng rng(plan.seed);
    SmoothResult out{inst, 0.0};
    double qsum = 0.0;
    for (std::size_t c = 0; c < inst.m(); ++c) {
        double prod = 1.0;
        // step 1: pick S_C, step 2: re-randomize the selected literals
        for (int i = 0; i < inst.k; ++i) {
            const double p = plan.probabilities[c][i];
            prod *= p;
            if (rng.bernoulli(p)) out.instance.literals[c][i] = rng.sign();
        }
        qsum += prod;
    }
    out.q = inst.m() ? qsum / static_cast<double>(inst.m()) : 0.0;
    return out;
}

namespace {

XorInstance parse_xor_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    XorInstance inst;
    long m_expected = -1;
    while (std::getline(is, line)) {
        ++lineno;
        auto tok = tokens(line);
        if (tok.empty() || tok[0] == "c") continue;
        if (tok[0] == "p") {
            if (tok.size() != 5 || tok[1] != "xor") parse_fail(lineno, "expected 'p xor n m k'");
            inst.n = std::stoi(tok[2]);
            m_expected = std::stol(tok[3]);
            inst.k = std::stoi(tok[4]);
            continue;
        }
        if (m_expected < 0) parse_fail(lineno, "clause before header");
        if (tok.size() != static_cast<std::size_t>(inst.k) + 1)
            parse_fail(lineno, "arity mismatch: expected " + std::to_string(inst.k) + " variables");
        Rat b = parse_coeff(tok[0], lineno);
        if (b < -1 || b > 1) parse_fail(lineno, "coefficient outside [-1,1]");
        VertexSet c;
        for (int i = 1; i <= inst.k; ++i) {
            int v = std::stoi(tok[i]);
            if (v < 1 || v > inst.n) parse_fail(lineno, "variable out of range");
            c.push_back(v);
        }
        std::sort(c.begin(), c.end());
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i] == c[i - 1]) parse_fail(lineno, "repeated variable in clause");
        inst.clauses.push_back(std::move(c));
        inst.coeffs.push_back(std::move(b));
    }
    if (m_expected < 0) throw std::runtime_error("parse error: missing 'p xor' header");
    if (static_cast<long>(inst.m()) != m_expected)
        throw std::runtime_error("parse error: header declares m=" + std::to_string(m_expected) +
                                 " but found " + std::to_string(inst.m()) + " clauses");
    return inst;
}

std::string write_xor_text(const XorInstance& inst) {
    std::ostringstream os;
    os << "p xor " << inst.n << ' ' << inst.m() << ' ' << inst.k << '\n';
    for (std::size_t c = 0; c < inst.m(); ++c) {
        os << coeff_to_string(inst.coeffs[c]);
        for (int v : inst.clauses[c]) os << ' ' << v;
        os << '\n';
    }
    return os.str();
}

CspInstance parse_dimacs_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    CspInstance inst;
    long m_expected = -1;
    int arity = -1;
    std::vector<std::vector<int>> raw;
    while (std::getline(is, line)) {
        ++lineno;
        auto tok = tokens(line);
        if (tok.empty() || tok[0] == "c") continue;
        if (tok[0] == "p") {
            if (tok.size() != 4 || tok[1] != "cnf") parse_fail(lineno, "expected 'p cnf n m'");
            inst.n = std::stoi(tok[2]);
            m_expected = std::stol(tok[3]);
            continue;
        }
        if (m_expected < 0) parse_fail(lineno, "clause before header");
        if (tok.back() != "0") parse_fail(lineno, "clause not terminated by 0");
        std::vector<int> lits;
        for (std::size_t i = 0; i + 1 < tok.size(); ++i) {
            int lit = std::stoi(tok[i]);
            if (lit == 0 || std::abs(lit) > inst.n) parse_fail(lineno, "literal out of range");
            lits.push_back(lit);
        }
        if (lits.empty()) parse_fail(lineno, "empty clause");
        if (arity < 0) arity = static_cast<int>(lits.size());
        if (static_cast<int>(lits.size()) != arity)
            parse_fail(lineno, "arity mismatch: instance is " + std::to_string(arity) + "-CNF");
        std::set<int> vars;
        for (int lit : lits) vars.insert(std::abs(lit));
        if (static_cast<int>(vars.size()) != arity) parse_fail(lineno, "repeated variable in clause");
        raw.push_back(std::move(lits));
    }
    if (m_expected < 0) throw std::runtime_error("parse error: missing 'p cnf' header");
    if (static_cast<long>(raw.size()) != m_expected)
        throw std::runtime_error("parse error: clause count does not match header");
    inst.k = arity;
    inst.predicate = or_predicate(arity);
    for (auto& lits : raw) {
        std::sort(lits.begin(), lits.end(),
                  [](int a, int b) { return std::abs(a) < std::abs(b); });
        std::vector<int> scope, signs;
        for (int lit : lits) {
            scope.push_back(std::abs(lit));
            signs.push_back(lit > 0 ? 1 : -1);
        }
        inst.scopes.push_back(std::move(scope));
        inst.literals.push_back(std::move(signs));
    }
    return inst;
}

std::string write_dimacs_text(const CspInstance& inst) {
    std::ostringstream os;
    os << "p cnf " << inst.n << ' ' << inst.m() << '\n';
    for (std::size_t c = 0; c < inst.m(); ++c) {
        std::vector<int> lits;
        for (int i = 0; i < inst.k; ++i) lits.push_back(inst.scopes[c][i] * inst.literals[c][i]);
        std::sort(lits.begin(), lits.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
        for (int lit : lits) os << lit << ' ';
        os << "0\n";
    }
    return os.str();
}

json predicate_to_json(const Predicate& p) {
    json jp;
    jp["k"] = p.k;
    jp["truth_table"] = p.truth_table;
    json jf = json::array();
    for (const auto& [mask, coeff] : p.fourier) jf.push_back({mask, rat_to_json(coeff)});
    jp["fourier"] = jf;
    if (!p.name.empty()) jp["name"] = p.name;
    return jp;
}

Predicate predicate_from_json(const json& jp) {
    Predicate p;
    p.k = jp.at("k").get<int>();
    p.truth_table = jp.at("truth_table").get<std::vector<std::uint8_t>>();
    for (const auto& kv : jp.at("fourier"))
        p.fourier[kv.at(0).get<std::uint32_t>()] = rat_from_string(kv.at(1).get<std::string>());
    if (jp.contains("name")) p.name = jp.at("name").get<std::string>();
    if (p.fourier.empty()) p.fourier = fourier_expansion(p);
    p.validate();
    return p;
}

json instance_to_json(const AnyInstance& any) {
    json j;
    if (std::holds_alternative<XorInstance>(any)) {
        const auto& inst = std::get<XorInstance>(any);
        j["kind"] = "xor";
        j["n"] = inst.n;
        j["k"] = inst.k;
        j["m"] = inst.m();
        j["clauses"] = inst.clauses;
        json jc = json::array();
        for (const auto& b : inst.coeffs) jc.push_back(rat_to_json(b));
        j["coeffs"] = jc;
    } else {
        const auto& inst = std::get<CspInstance>(any);
        j["kind"] = "csp";
        j["n"] = inst.n;
        j["k"] = inst.k;
        j["m"] = inst.m();
        j["predicate"] = predicate_to_json(inst.predicate);
        j["scopes"] = inst.scopes;
        j["literals"] = inst.literals;
    }
    return j;
}

AnyInstance instance_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "xor") {
        XorInstance inst;
        inst.n = j.at("n").get<int>();
        inst.k = j.at("k").get<int>();
        inst.clauses = j.at("clauses").get<std::vector<VertexSet>>();
        for (const auto& c : j.at("coeffs")) inst.coeffs.push_back(rat_from_string(c.get<std::string>()));
        inst.validate();
        return inst;
    }
    if (kind == "csp") {
        CspInstance inst;
        inst.n = j.at("n").get<int>();
        inst.k = j.at("k").get<int>();
        inst.predicate = predicate_from_json(j.at("predicate"));
        inst.scopes = j.at("scopes").get<std::vector<std::vector<int>>>();
        inst.literals = j.at("literals").get<std::vector<std::vector<int>>>();
        inst.validate();
        return inst;
    }
    throw std::runtime_error("parse error: unknown instance kind '" + kind + "'");
}

}  // namespace

AnyInstance parse_instance(const std::string& text, InstanceFormat format) {
    switch (format) {
        case InstanceFormat::Xor: {
            auto inst = parse_xor_text(text);
            inst.validate();
            return inst;
        }
        case InstanceFormat::DimacsCnf: {
            auto inst = parse_dimacs_text(text);
            inst.validate();
            return inst;
        }
        case InstanceFormat::Json:
            return instance_from_json(json::parse(text));
    }
    throw std::logic_error("unreachable");
}

std::string serialize_instance(const AnyInstance& inst, InstanceFormat format) {
    switch (format) {
        case InstanceFormat::Xor:
            if (!std::holds_alternative<XorInstance>(inst))
                throw std::invalid_argument("xor format holds XOR instances only");
            return write_xor_text(std::get<XorInstance>(inst));
        case InstanceFormat::DimacsCnf: {
            if (!std::holds_alternative<CspInstance>(inst))
                throw std::invalid_argument("dimacs-cnf format holds CSP instances only");
            const auto& csp = std::get<CspInstance>(inst);
            if (csp.predicate.name != "or")
                throw std::invalid_argument("dimacs-cnf format holds OR predicates only");
            return write_dimacs_text(csp);
        }
        case InstanceFormat::Json:
            return instance_to_json(inst).dump(2) + "\n";
    }
    throw std::logic_error("unreachable");
}

AnyInstance read_instance(const std::string& path, InstanceFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str(), format);
}

void write_instance(const AnyInstance& inst, const std::string& path, InstanceFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << serialize_instance(inst, format);
    if (!out) throw std::runtime_error("write failure on " + path);
}

namespace {
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}
}  // namespace

std::uint64_t instance_digest(const XorInstance& inst) {
    return fnv1a(write_xor_text(inst));
}

std::uint64_t instance_digest(const CspInstance& inst) {
    return fnv1a(instance_to_json(inst).dump());
}

}  // namespace kref
