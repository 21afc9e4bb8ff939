#include "sps/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sps/io.hpp"

namespace sps::cli {

namespace fs = std::filesystem;

namespace {

SpsCircuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("cannot parse " + path + ": " + e.what());
    }
    return circuit_from_json(j);
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

bool same_field(const Field& a, const Field& b) { return a.q == b.q && a.k == b.k && a.mod == b.mod; }

}  // namespace

int cmd_generate(const GenerateParams& p, std::ostream& log) {
    InstanceMode mode;
    try {
        mode = parse_mode(p.mode);
        if (!is_prime(p.q)) throw std::invalid_argument("q must be prime");
        if (p.count < 1) throw std::invalid_argument("count must be positive");
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    }
    int k = p.ext > 0 ? p.ext : ext_degree_for(p.q, p.ext_bits);
    FieldPtr F = build_extension(p.q, k);
    Rng rng(p.seed);
    fs::create_directories(p.out);
    json manifest;
    manifest["seed"] = p.seed;
    manifest["params"] = {{"n", p.n},   {"d", p.d},         {"q", p.q},        {"ext", k},
                          {"rank", p.rank}, {"mode", to_string(mode)}, {"count", p.count}};
    manifest["files"] = json::array();
    for (int i = 0; i < p.count; ++i) {
        Instance inst;
        try {
            inst = random_instance(p.n, p.d, F, p.rank, mode, rng);
        } catch (const std::exception& e) {
            log << "error: " << e.what() << "\n";
            return kUsage;
        }
        std::ostringstream name;
        name << "instance_" << std::setw(4) << std::setfill('0') << i << ".json";
        write_json((fs::path(p.out) / name.str()).string(), circuit_to_json(inst.circuit));
        manifest["files"].push_back({{"file", name.str()}, {"rank", inst.truth.rank}});
    }
    write_json((fs::path(p.out) / "manifest.json").string(), manifest);
    log << "wrote " << p.count << " instance(s) to " << p.out << "\n";
    return kOk;
}

int cmd_reconstruct(const ReconstructParams& p, std::ostream& log) {
    SpsCircuit input;
    Algo algo;
    try {
        p.cfg.validate();
        algo = parse_algo(p.algo);
        input = load_circuit(p.in);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    }
    // the reconstruction only sees the black box
    PolyOracle oracle = circuit_oracle(input);
    Rng rng(p.seed);
    json rep;
    rep["instance"] = p.in;
    rep["seed"] = p.seed;
    rep["mode"] = p.algo;
    int code = kOk;
    try {
        ReconResult r = reconstruct(oracle, input.d, algo, rng, p.cfg);
        rep["status"] = to_string(r.status);
        rep["path"] = r.path;
        rep["fan_in"] = r.fan_in();
        rep["queries"] = r.queries;
        rep["seconds"] = r.seconds;
        rep["pit_trials"] = r.pit_trials;
        rep["message"] = r.message;
        if (r.status == ReconStatus::success) {
            if (input.fan_in() == 2 && r.fan_in() == 2)
                rep["structural_match"] = structural_match(decompose(r.circuit), decompose(input));
            if (!p.out.empty()) write_json(p.out, circuit_to_json(r.circuit));
        } else {
            code = kFailed;
        }
    } catch (const std::logic_error& e) {
        rep["status"] = "error";
        rep["message"] = e.what();
        code = kInternal;
    } catch (const std::exception& e) {
        rep["status"] = "error";
        rep["message"] = e.what();
        code = kInternal;
    }
    if (p.report.empty()) {
        log << rep.dump() << "\n";
    } else {
        std::ofstream out(p.report, std::ios::app);
        out << rep.dump() << "\n";
        log << rep["status"].get<std::string>() << "\n";
    }
    return code;
}

int cmd_verify(const VerifyParams& p, std::ostream& log) {
    SpsCircuit a, b;
    try {
        if (p.trials < 1) throw std::invalid_argument("trials must be positive");
        a = load_circuit(p.a);
        b = load_circuit(p.b);
        if (!same_field(*a.F, *b.F)) throw ParseError("field mismatch");
        if (a.n != b.n || a.d != b.d) throw ParseError("n or d mismatch");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    }
    Rng rng(p.seed);
    bool eq = equivalent_pit(circuit_oracle(a), circuit_oracle(b), p.trials, rng);
    log << "pit: " << (eq ? "equivalent" : "not-equivalent") << "\n";
    if (a.fan_in() == 2 && b.fan_in() == 2)
        log << "structural: " << (structural_match(decompose(a), decompose(b)) ? "match" : "mismatch") << "\n";
    return eq ? kOk : kFailed;
}

int run(int argc, const char* const* argv, std::ostream& log) {
    CLI::App app{"depth-3 top fan-in 2 circuit reconstruction"};
    app.require_subcommand(1);

    GenerateParams gp;
    auto* gen = app.add_subcommand("generate", "write random instances and a manifest");
    gen->add_option("--n", gp.n, "variables");
    gen->add_option("--d", gp.d, "degree");
    gen->add_option("--q", gp.q, "prime field size");
    gen->add_option("--ext", gp.ext, "extension degree (0: from --ext-bits)");
    gen->add_option("--ext-bits", gp.ext_bits, "minimum log2 of the extension size");
    gen->add_option("--rank", gp.rank, "target rank");
    gen->add_option("--mode", gp.mode, "general|corner|low_rank");
    gen->add_option("--count", gp.count, "number of instances");
    gen->add_option("--seed", gp.seed, "seed");
    gen->add_option("--out", gp.out, "output directory");

    ReconstructParams rp;
    auto* rec = app.add_subcommand("reconstruct", "reconstruct a circuit from black-box access");
    rec->add_option("--in", rp.in, "input circuit JSON")->required();
    rec->add_option("--algo", rp.algo, "auto|low|high|corner");
    rec->add_option("--pit-trials", rp.cfg.pit_trials, "identity test trials");
    rec->add_option("--tau-x", rp.cfg.tau_x, "minimum ordinary-line set size");
    rec->add_option("--tau-b", rp.cfg.tau_b, "part size");
    rec->add_option("--tau-r", rp.cfg.tau_r, "independent set size (0: 60*ceil(log2 d)+61)");
    rec->add_option("--rmax", rp.cfg.R_max, "low-rank search cap");
    rec->add_option("--vanish-rounds", rp.cfg.vanish.rounds, "basis changes in the vanishing search (0: auto)");
    rec->add_option("--seed", rp.seed, "seed");
    rec->add_option("--out", rp.out, "output circuit JSON");
    rec->add_option("--report", rp.report, "JSON-lines report file");

    VerifyParams vp;
    auto* ver = app.add_subcommand("verify", "compare two circuits");
    ver->add_option("a", vp.a, "first circuit")->required();
    ver->add_option("b", vp.b, "second circuit")->required();
    ver->add_option("--trials", vp.trials, "identity test trials");
    ver->add_option("--seed", vp.seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        log << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    }
    try {
        if (*gen) return cmd_generate(gp, log);
        if (*rec) return cmd_reconstruct(rp, log);
        if (*ver) return cmd_verify(vp, log);
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}

}  // namespace sps::cli
