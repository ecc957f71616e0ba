#include <iostream>

#include <CLI11.hpp>

#include "trs/bench.hpp"

namespace {

struct CommonFlags {
    std::string engine = "seq";
    unsigned workers = 0;
    std::uint32_t chunk_size = 256;
    std::uint32_t capacity = 0;
    bool fixed_capacity = false;
    std::uint64_t step_budget = 1'000'000'000;
    std::string trace_path;
    bool no_subterm_cursor = false;

    trs::EngineConfig config() const {
        trs::EngineConfig cfg;
        cfg.capacity = capacity;
        cfg.seq.step_budget = step_budget;
        cfg.sweep.step_budget = step_budget;
        cfg.sweep.workers = workers;
        cfg.sweep.chunk_size = chunk_size;
        cfg.sweep.fixed_capacity = fixed_capacity;
        cfg.sweep.subterm_cursor = !no_subterm_cursor;
        return cfg;
    }
};

void add_engine_flags(CLI::App* cmd, CommonFlags& flags, bool with_engine_choice) {
    if (with_engine_choice)
        cmd->add_option("--engine", flags.engine, "rewrite engine: seq or sweep")
            ->check(CLI::IsMember({"seq", "sweep"}));
    cmd->add_option("--workers", flags.workers, "sweep worker count (0 = hardware)");
    cmd->add_option("--chunk-size", flags.chunk_size, "slots per sweep work unit");
    cmd->add_option("--capacity", flags.capacity, "initial term store slots");
    cmd->add_flag("--fixed-capacity", flags.fixed_capacity,
                  "never grow the store; fail hard when full");
    cmd->add_option("--step-budget", flags.step_budget, "abort after this many rewrites");
    cmd->add_flag("--no-subterm-cursor", flags.no_subterm_cursor,
                  "rescan subterms from the first argument every sweep");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"term rewriting toolkit: sequential and sweep-parallel engines"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string file;
    std::string out_path;

    CLI::App* normalize = app.add_subcommand("normalize", "rewrite a .trs input to normal form");
    normalize->add_option("file", file, "input .trs file")->required();
    add_engine_flags(normalize, flags, true);
    normalize->add_option("--trace", flags.trace_path, "write the sweep trace CSV here");

    CLI::App* gen = app.add_subcommand("gen", "generate a benchmark .trs file");
    std::string family;
    std::vector<std::uint32_t> params;
    std::uint64_t seed = 1;
    gen->add_option("family", family, "mergesort | treemergesort | transform")->required();
    gen->add_option("params", params,
                    "mergesort N | treemergesort DEPTH K | transform DEPTH")
        ->expected(1, 2);
    gen->add_option("--seed", seed, "numeral sequence seed");
    gen->add_option("--out", out_path, "output path")->required();

    CLI::App* bench = app.add_subcommand("bench", "time both engines and report terms/s");
    std::vector<std::string> engines{"seq", "sweep"};
    unsigned repetitions = 3;
    std::string csv_path;
    bench->add_option("file", file, "input .trs file")->required();
    bench->add_option("--engines", engines, "engines to run")
        ->check(CLI::IsMember({"seq", "sweep"}));
    bench->add_option("--repetitions", repetitions, "runs per engine");
    bench->add_option("--csv", csv_path, "write per-run rows here");
    add_engine_flags(bench, flags, false);

    CLI::App* dump = app.add_subcommand("dump-dispatch", "print the compiled match programs");
    dump->add_option("file", file, "input .trs file")->required();

    CLI11_PARSE(app, argc, argv);

    if (normalize->parsed())
        return trs::cmd_normalize(file, flags.engine, flags.config(), flags.trace_path, std::cout,
                                  std::cerr);
    if (gen->parsed()) {
        trs::GenSpec spec;
        if (family == "mergesort" && params.size() == 1) {
            spec = trs::GenSpec::mergesort(params[0], seed);
        } else if (family == "treemergesort" && params.size() == 2) {
            spec = trs::GenSpec::treemergesort(params[0], params[1], seed);
        } else if (family == "transform" && params.size() == 1) {
            spec = trs::GenSpec::transform(params[0]);
        } else {
            std::cerr << "gen: expected 'mergesort N', 'treemergesort DEPTH K' or 'transform DEPTH'\n";
            return trs::kExitInputError;
        }
        return trs::cmd_gen(spec, out_path, std::cerr);
    }
    if (bench->parsed())
        return trs::cmd_bench(file, engines, repetitions, flags.config(), csv_path, std::cout,
                              std::cerr);
    if (dump->parsed()) return trs::cmd_dump_dispatch(file, std::cout, std::cerr);
    return trs::kExitInputError;
}
