#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "kref/covers.hpp"
#include "kref/csp.hpp"
#include "kref/decompose.hpp"
#include "kref/instances.hpp"
#include "kref/refute.hpp"
#include "kref/report.hpp"
#include "kref/wam_experiment.hpp"

namespace {

using namespace kref;

Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            std::string tail = s.substr(dot + 1);
            Int num = Int(s.substr(0, dot) + tail);
            return Rat(num, ipow(10, static_cast<long>(tail.size())));
        }
        return Rat(Int(s));
    }
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

InstanceFormat format_from_name(const std::string& name) {
    if (name == "xor") return InstanceFormat::Xor;
    if (name == "cnf" || name == "dimacs-cnf") return InstanceFormat::DimacsCnf;
    if (name == "json") return InstanceFormat::Json;
    throw CLI::ValidationError("format", "unknown format '" + name + "'");
}

InstanceFormat guess_format(const std::string& path, const std::string& flag) {
    if (!flag.empty()) return format_from_name(flag);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".cnf") return InstanceFormat::DimacsCnf;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return InstanceFormat::Json;
    return InstanceFormat::Xor;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("KIKREF_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

void emit_report(const RunReport& report, const std::string& path) {
    if (path.empty()) return;
    write_file(path, report.to_json());
}

std::vector<long> parse_list(const std::string& csv) {
    std::vector<long> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    if (out.empty()) throw CLI::ValidationError("list", "empty list");
    return out;
}

int cmd_gen(const std::string& out_path, const std::string& format, const std::string& model,
            int n, int k, int m, std::uint64_t seed, const std::string& predicate_name,
            const std::string& coeff_dist, double smooth_p, const std::string& report_path) {
    RunReport report;
    report.command = "gen";
    report.seeds = {seed};
    report.parameters = {{"model", model}, {"n", n},    {"k", k},
                         {"m", m},         {"seed", seed}, {"predicate", predicate_name}};
    AnyInstance out;
    if (predicate_name.empty()) {
        const CoeffDist dist =
            coeff_dist == "dyadic" ? CoeffDist::UniformDyadic : CoeffDist::PlusMinusOne;
        out = gen_random_xor(n, k, m, seed, dist);
    } else {
        std::optional<Predicate> pred;
        if (predicate_name.rfind("tt:", 0) == 0)
            pred = predicate_from_truth_table(predicate_name.substr(3), "custom");
        else
            pred = builtin_predicate(predicate_name);
        if (!pred) throw std::runtime_error("unknown predicate '" + predicate_name + "'");
        CspInstance inst = gen_random_csp(n, m, *pred, seed);
        if (model == "smoothed") {
            SmoothingPlan plan;
            plan.seed = seed ^ 0x5eedull;
            plan.probabilities.assign(inst.m(), std::vector<double>(inst.k, smooth_p));
            auto sm = smooth_csp(inst, plan);
            report.outputs["q"] = sm.q;
            inst = std::move(sm.instance);
        }
        out = std::move(inst);
    }
    write_instance(out, out_path, guess_format(out_path, format));
    report.outputs["path"] = out_path;
    emit_report(report, report_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_refute(const std::string& path, const std::string& format, long ell, const std::string& eps_s,
               double tau, const std::string& cert_path, const std::string& report_path,
               std::size_t dense_cap, std::uint64_t max_cells) {
    RunReport report;
    report.command = "refute";
    report.parameters = {{"instance", path}, {"ell", ell}, {"eps", eps_s}, {"tau", tau}};
    const AnyInstance any = read_instance(path, guess_format(path, format));
    if (!std::holds_alternative<XorInstance>(any))
        throw std::runtime_error("refute expects an XOR instance (use refute-csp for CSPs)");
    const auto& inst = std::get<XorInstance>(any);
    RefuteOptions opts;
    opts.dense_cap = dense_cap;
    opts.max_cells = max_cells;
    RefutationResult res;
    {
        StageTimer timer(report, "refute");
        res = refute_poly(inst, ell, parse_rat(eps_s), tau, opts);
    }
    report.outputs["alg_val"] = res.alg_val;
    report.outputs["levels"] = res.cert.levels.size();
    if (!cert_path.empty()) {
        write_file(cert_path, res.cert.to_json());
        report.outputs["certificate"] = cert_path;
    }
    emit_report(report, report_path);
    std::cout << "alg-val " << res.alg_val << "\n";
    return 0;
}

int cmd_refute_csp(const std::string& path, const std::string& format, long ell,
                   const std::string& eps_s, double tau, const std::string& cert_path,
                   const std::string& report_path, std::size_t dense_cap) {
    RunReport report;
    report.command = "refute-csp";
    report.parameters = {{"instance", path}, {"ell", ell}, {"eps", eps_s}, {"tau", tau}};
    const AnyInstance any = read_instance(path, guess_format(path, format));
    if (!std::holds_alternative<CspInstance>(any))
        throw std::runtime_error("refute-csp expects a CSP instance");
    RefuteOptions opts;
    opts.dense_cap = dense_cap;
    CspRefuteResult res;
    {
        StageTimer timer(report, "refute-csp");
        res = refute_csp(std::get<CspInstance>(any), ell, parse_rat(eps_s), tau, opts);
    }
    report.outputs["alg_val"] = res.alg_val;
    report.outputs["t"] = res.t;
    if (!cert_path.empty()) {
        write_file(cert_path, res.to_json());
        report.outputs["certificate"] = cert_path;
    }
    emit_report(report, report_path);
    std::cout << "alg-val " << res.alg_val << "\n";
    return 0;
}

int cmd_decompose(const std::string& path, const std::string& format, long ell,
                  const std::string& eps_s, const std::string& out_path,
                  const std::string& report_path) {
    RunReport report;
    report.command = "decompose";
    report.parameters = {{"instance", path}, {"ell", ell}, {"eps", eps_s}};
    const AnyInstance any = read_instance(path, guess_format(path, format));
    if (!std::holds_alternative<XorInstance>(any))
        throw std::runtime_error("decompose expects an XOR instance");
    const Hypergraph h = std::get<XorInstance>(any).hypergraph();
    const Rat eps = parse_rat(eps_s);
    BipartiteContraction bc;
    {
        StageTimer timer(report, "decompose");
        bc = decompose(h, eps, ell);
    }
    const auto rep = verify_contraction(h, bc, eps, ell);
    std::cout << rep.to_string();
    if (!rep.all_pass()) throw std::runtime_error("verify_contraction failed");
    if (!out_path.empty()) write_file(out_path, bc.to_json());
    report.outputs["discarded"] = bc.discarded.m();
    for (const auto& level : bc.levels)
        report.outputs["m" + std::to_string(level.t)] = level.m();
    emit_report(report, report_path);
    return 0;
}

int cmd_cover(const std::string& path, const std::string& format, std::size_t max_len,
              const std::string& strategy_name, std::uint64_t seed, const std::string& report_path) {
    RunReport report;
    report.command = "cover";
    report.seeds = {seed};
    report.parameters = {{"instance", path}, {"max_len", max_len}, {"strategy", strategy_name}};
    const AnyInstance any = read_instance(path, guess_format(path, format));
    if (!std::holds_alternative<XorInstance>(any))
        throw std::runtime_error("cover expects an XOR instance");
    const Hypergraph h = std::get<XorInstance>(any).hypergraph();
    CoverStrategy strategy = CoverStrategy::Gf2Kernel;
    if (strategy_name == "exhaustive") strategy = CoverStrategy::Exhaustive;
    else if (strategy_name == "kikuchi-cycle") strategy = CoverStrategy::KikuchiCycle;
    else if (strategy_name != "gf2-kernel")
        throw std::runtime_error("unknown strategy '" + strategy_name + "'");
    CoverSearchOptions opts;
    opts.seed = seed;
    const auto cover = find_even_cover(h, max_len, strategy, opts);
    if (!cover) {
        std::cout << "no cover found (length <= " << max_len << ")\n";
        report.outputs["found"] = false;
    } else {
        std::cout << "even cover of length " << cover->length() << ":";
        for (auto id : cover->edge_ids) std::cout << ' ' << id;
        std::cout << "\n";
        report.outputs["found"] = true;
        report.outputs["length"] = cover->length();
        report.outputs["edge_ids"] = cover->edge_ids;
    }
    emit_report(report, report_path);
    return 0;
}

int cmd_witness(const std::string& path, const std::string& format, std::size_t max_len,
                std::size_t want, std::uint64_t seed, const std::string& out_path,
                const std::string& report_path) {
    RunReport report;
    report.command = "witness";
    report.seeds = {seed};
    report.parameters = {{"instance", path}, {"max_len", max_len}, {"want", want}};
    const AnyInstance any = read_instance(path, guess_format(path, format));
    CoverSearchOptions opts;
    opts.seed = seed;
    FkoWitness w;
    double bound;
    if (std::holds_alternative<XorInstance>(any)) {
        const auto& inst = std::get<XorInstance>(any);
        w = build_fko_witness(inst, max_len, want, CoverStrategy::Gf2Kernel, opts);
        const auto check = verify_fko_witness(inst, w);
        if (!check.ok) throw std::runtime_error("built witness failed verification: " + check.reason);
        bound = check.bound;
    } else {
        const auto& inst = std::get<CspInstance>(any);
        CspWitnessParams params;
        params.max_len = max_len;
        params.want = want;
        params.search = opts;
        w = build_csp_fko_witness(inst, params);
        const auto check = verify_csp_fko_witness(inst, w, params);
        if (!check.ok) throw std::runtime_error("built witness failed verification: " + check.reason);
        bound = check.bound;
    }
    if (!out_path.empty()) write_file(out_path, w.to_json());
    std::cout << "witness: " << w.r() << " disjoint covers, certified bound " << bound << "\n";
    report.outputs["covers"] = w.r();
    report.outputs["bound"] = bound;
    emit_report(report, report_path);
    return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& format,
               const std::string& witness_path, const std::string& certificate_path,
               const std::string& report_path) {
    RunReport report;
    report.command = "verify";
    if (!witness_path.empty()) {
        const AnyInstance any = read_instance(instance_path, guess_format(instance_path, format));
        std::ifstream in(witness_path);
        if (!in) throw std::runtime_error("cannot open " + witness_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const FkoWitness w = FkoWitness::from_json(buf.str());
        WitnessCheck check;
        std::size_t m;
        if (std::holds_alternative<XorInstance>(any)) {
            check = verify_fko_witness(std::get<XorInstance>(any), w);
            m = std::get<XorInstance>(any).m();
        } else {
            check = verify_csp_fko_witness(std::get<CspInstance>(any), w);
            m = std::get<CspInstance>(any).m();
        }
        if (!check.ok) {
            std::cout << "witness rejected: " << check.reason << "\n";
            return 1;
        }
        std::cout << "certified bound " << check.bound << " (" << check.violated_covers
                  << " violated covers over m = " << m << ")\n";
        report.outputs["bound"] = check.bound;
        emit_report(report, report_path);
        return 0;
    }
    if (certificate_path.empty())
        throw std::runtime_error("verify needs --witness or --certificate");
    std::ifstream in(certificate_path);
    if (!in) throw std::runtime_error("cannot open " + certificate_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto cert = RefutationCertificate::from_json(buf.str());
    const auto replay = replay_certificate(cert);
    if (!instance_path.empty()) {
        const AnyInstance any = read_instance(instance_path, guess_format(instance_path, format));
        if (std::holds_alternative<XorInstance>(any) &&
            instance_digest(std::get<XorInstance>(any)) != cert.digest) {
            std::cout << "certificate rejected: instance digest mismatch\n";
            return 1;
        }
    }
    if (!replay.ok) {
        std::cout << "certificate rejected: " << replay.detail << "\n";
        return 1;
    }
    std::cout << "certificate verified: alg-val " << replay.recomputed << "\n";
    report.outputs["alg_val"] = replay.recomputed;
    emit_report(report, report_path);
    return 0;
}

int cmd_wam(int n, int m, long ell, std::uint64_t seed, const std::string& report_path) {
    RunReport report;
    report.command = "wam";
    report.seeds = {seed};
    report.parameters = {{"n", n}, {"m", m}, {"ell", ell}};
    const WamExperiment ex = run_wam_experiment(n, m, ell, seed);
    std::cout << "ell' = " << ex.ell_prime << ", expected row ones C(ell',2) = "
              << ex.expected_row_ones << "\n";
    std::cout << "submatrix rows " << (ex.submatrix_rows_ok ? "all match" : "MISMATCH") << "\n";
    std::cout << "power-iteration estimate " << ex.estimate << " (>= " << ex.expected_row_ones
              << " expected)\n";
    report.outputs["ell_prime"] = ex.ell_prime;
    report.outputs["estimate"] = ex.estimate;
    report.outputs["submatrix_rows_ok"] = ex.submatrix_rows_ok;
    emit_report(report, report_path);
    if (!ex.submatrix_rows_ok || ex.estimate < static_cast<double>(ex.expected_row_ones) - 1e-9)
        return 1;
    return 0;
}

int cmd_sweep(int k, const std::string& n_list, const std::string& m_list, const std::string& ell_list,
              int seeds, const std::string& eps_s, double tau, const std::string& out_csv,
              std::size_t dense_cap, std::size_t cover_max_len) {
    std::ostringstream csv;
    // fixed column schema; an extra covers_found column appears only when
    // cover counting is switched on
    csv << "n,m,k,ell,seed,alg_val,bad_rows,buckets,runtime_ms";
    if (cover_max_len > 0) csv << ",covers_found";
    csv << "\n";
    const Rat eps = parse_rat(eps_s);
    for (long n : parse_list(n_list)) {
        for (long m : parse_list(m_list)) {
            for (long ell : parse_list(ell_list)) {
                for (int seed = 1; seed <= seeds; ++seed) {
                    const XorInstance inst =
                        gen_random_xor(static_cast<int>(n), k, static_cast<int>(m), seed);
                    RefuteOptions opts;
                    opts.dense_cap = dense_cap;
                    const auto t0 = std::chrono::steady_clock::now();
                    const RefutationResult res = refute_poly(inst, ell, eps, tau, opts);
                    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count();
                    std::uint64_t bad = 0, buckets = 0;
                    for (const auto& lc : res.cert.levels) {
                        bad += lc.bad_rows;
                        buckets += lc.bucket_sizes.size();
                    }
                    csv << n << ',' << m << ',' << k << ',' << ell << ',' << seed << ','
                        << res.alg_val << ',' << bad << ',' << buckets << ',' << ms;
                    if (cover_max_len > 0)
                        csv << ','
                            << extract_disjoint_covers(inst.hypergraph(), cover_max_len, 4).size();
                    csv << "\n";
                }
            }
        }
    }
    if (out_csv.empty())
        std::cout << csv.str();
    else
        write_file(out_csv, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"refutation toolkit for semirandom and smoothed Boolean CSPs"};
    app.require_subcommand(1);

    std::string out_path, format, model = "semirandom", predicate_name, coeff_dist = "pm1";
    std::string report_path, cert_path, instance_path, witness_path, certificate_path;
    std::string eps_s = "1/2", strategy = "gf2-kernel";
    std::string n_list = "20", m_list = "100", ell_list = "2";
    int n = 20, k = 3, m = 100, seeds = 3;
    long ell = 2;
    double tau = 1e-2, smooth_p = 0.5;
    std::uint64_t seed = default_seed();
    std::size_t max_len = 40, want = 8, dense_cap = 4096, cover_max_len = 0;
    std::uint64_t max_cells = 30'000'000;

    auto* gen = app.add_subcommand("gen", "generate a random/semirandom/smoothed instance");
    gen->add_option("--model", model, "random | semirandom | smoothed");
    gen->add_option("--n", n)->required();
    gen->add_option("--k", k);
    gen->add_option("--m", m)->required();
    gen->add_option("--seed", seed);
    gen->add_option("--predicate", predicate_name, "builtin predicate (or3, parity3, nae4, hadamard-q1)");
    gen->add_option("--coeff-dist", coeff_dist, "pm1 | dyadic");
    gen->add_option("--smooth-p", smooth_p, "smoothing probability for --model smoothed");
    gen->add_option("-o,--out", out_path)->required();
    gen->add_option("--format", format, "xor | cnf | json");
    gen->add_option("--report", report_path);

    auto* refute = app.add_subcommand("refute", "refute an XOR instance");
    refute->add_option("instance", instance_path)->required();
    refute->add_option("--ell", ell)->required();
    refute->add_option("--eps", eps_s);
    refute->add_option("--tau", tau);
    refute->add_option("--format", format);
    refute->add_option("-o,--certificate", cert_path);
    refute->add_option("--report", report_path);
    refute->add_option("--dense-cap", dense_cap, "largest block factorized densely");
    refute->add_option("--max-cells", max_cells, "Kikuchi generation event cap");

    auto* rcsp = app.add_subcommand("refute-csp", "refute a CSP instance");
    rcsp->add_option("instance", instance_path)->required();
    rcsp->add_option("--ell", ell)->required();
    rcsp->add_option("--eps", eps_s);
    rcsp->add_option("--tau", tau);
    rcsp->add_option("--format", format);
    rcsp->add_option("-o,--certificate", cert_path);
    rcsp->add_option("--report", report_path);
    rcsp->add_option("--dense-cap", dense_cap);

    auto* dec = app.add_subcommand("decompose", "regularity decomposition with verification");
    dec->add_option("instance", instance_path)->required();
    dec->add_option("--ell", ell)->required();
    dec->add_option("--eps", eps_s);
    dec->add_option("--format", format);
    dec->add_option("-o,--out", out_path);
    dec->add_option("--report", report_path);

    auto* cover = app.add_subcommand("cover", "search one even cover");
    cover->add_option("instance", instance_path)->required();
    cover->add_option("--max-len", max_len);
    cover->add_option("--strategy", strategy, "exhaustive | gf2-kernel | kikuchi-cycle");
    cover->add_option("--seed", seed);
    cover->add_option("--format", format);
    cover->add_option("--report", report_path);

    auto* witness = app.add_subcommand("witness", "build a disjoint-even-cover witness");
    witness->add_option("instance", instance_path)->required();
    witness->add_option("--max-len", max_len);
    witness->add_option("--want", want);
    witness->add_option("--seed", seed);
    witness->add_option("--format", format);
    witness->add_option("-o,--out", out_path);
    witness->add_option("--report", report_path);

    auto* verify = app.add_subcommand("verify", "verify a witness or replay a certificate");
    verify->add_option("--instance", instance_path);
    verify->add_option("--witness", witness_path);
    verify->add_option("--certificate", certificate_path);
    verify->add_option("--format", format);
    verify->add_option("--report", report_path);

    auto* wam = app.add_subcommand("wam", "adversarial tuple-matrix experiment");
    wam->add_option("--n", n)->required();
    wam->add_option("--m", m)->required();
    wam->add_option("--ell", ell)->required();
    wam->add_option("--seed", seed);
    wam->add_option("--report", report_path);

    auto* sweep = app.add_subcommand("sweep", "grid sweep; CSV output");
    sweep->add_option("--k", k);
    sweep->add_option("--n", n_list, "comma-separated");
    sweep->add_option("--m", m_list, "comma-separated");
    sweep->add_option("--ell", ell_list, "comma-separated");
    sweep->add_option("--seeds", seeds, "seeds 1..count per grid point");
    sweep->add_option("--eps", eps_s);
    sweep->add_option("--tau", tau);
    sweep->add_option("--dense-cap", dense_cap);
    sweep->add_option("--covers-max-len", cover_max_len, "also count disjoint covers up to this length");
    sweep->add_option("-o,--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(out_path, format, model, n, k, m, seed, predicate_name, coeff_dist,
                           smooth_p, report_path);
        if (refute->parsed())
            return cmd_refute(instance_path, format, ell, eps_s, tau, cert_path, report_path,
                              dense_cap, max_cells);
        if (rcsp->parsed())
            return cmd_refute_csp(instance_path, format, ell, eps_s, tau, cert_path, report_path,
                                  dense_cap);
        if (dec->parsed())
            return cmd_decompose(instance_path, format, ell, eps_s, out_path, report_path);
        if (cover->parsed())
            return cmd_cover(instance_path, format, max_len, strategy, seed, report_path);
        if (witness->parsed())
            return cmd_witness(instance_path, format, max_len, want, seed, out_path, report_path);
        if (verify->parsed())
            return cmd_verify(instance_path, format, witness_path, certificate_path, report_path);
        if (wam->parsed()) return cmd_wam(n, m, ell, seed, report_path);
        if (sweep->parsed())
            return cmd_sweep(k, n_list, m_list, ell_list, seeds, eps_s, tau, out_path, dense_cap,
                             cover_max_len);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
