#include "trs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

namespace trs {

namespace {

std::optional<RewriteSystem> load_file(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << path << ": cannot open file\n";
        return std::nullopt;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    ResolveResult result = load_system(buffer.str());
    if (!result.system) {
        for (const ParseError& e : result.errors) err << format_error(path, e) << '\n';
        return std::nullopt;
    }
    return std::move(result.system);
}

void print_report(std::ostream& out, const BenchReport& report) {
    out << "engine: " << report.engine << "\n"
        << "rewrites: " << report.total_rewrites << "\n"
        << "micros: " << report.micros << "\n"
        << "terms_per_s: " << static_cast<std::uint64_t>(report.terms_per_second) << "\n";
    if (report.engine == "sweep")
        out << "sweeps: " << report.sweep_count << "  max_width: " << report.max_sweep_width
            << "  median_width: " << report.median_sweep_width << "\n";
}

double rate(std::uint64_t rewrites, std::uint64_t micros) {
    return micros == 0 ? 0.0 : rewrites * 1e6 / static_cast<double>(micros);
}

}  // namespace

EngineRun run_engine(const RewriteSystem& system, const DispatchTable& table,
                     const std::string& engine, const EngineConfig& config) {
    EngineRun run_result;
    run_result.report.engine = engine;
    if (engine == "seq") {
        SeqResult result = normalize(system, table, system.input_term, config.seq);
        run_result.normal_form = result.normal_form;
        run_result.report.total_rewrites = result.stats.rewritten_terms;
        run_result.report.micros = result.stats.micros;
    } else if (engine == "sweep") {
        TermStore store = load(system, system.input_term, config.capacity);
        auto start = std::chrono::steady_clock::now();
        run_result.trace = run(store, table, config.sweep);
        run_result.report.micros = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                                  start)
                .count());
        run_result.normal_form = extract(store);
        run_result.report.total_rewrites = run_result.trace.total_rewrites();
        run_result.report.sweep_count = static_cast<std::uint32_t>(run_result.trace.records.size());
        run_result.report.max_sweep_width = run_result.trace.max_width();
        run_result.report.median_sweep_width = run_result.trace.median_width();
    } else {
        throw std::invalid_argument("unknown engine '" + engine + "' (expected seq or sweep)");
    }
    run_result.report.terms_per_second =
        rate(run_result.report.total_rewrites, run_result.report.micros);
    return run_result;
}

int cmd_normalize(const std::string& path, const std::string& engine, const EngineConfig& config,
                  const std::string& trace_path, std::ostream& out, std::ostream& err) {
    auto system = load_file(path, err);
    if (!system) return kExitInputError;
    DispatchTable table = compile(*system);
    EngineRun result;
    try {
        result = run_engine(*system, table, engine, config);
    } catch (const EngineError& e) {
        err << path << ": " << e.what() << '\n';
        return kExitResourceError;
    }
    out << print_term(system->signature, result.normal_form) << '\n';
    print_report(out, result.report);
    if (!trace_path.empty() && engine == "sweep") {
        std::ofstream trace_out(trace_path);
        if (!trace_out) {
            err << trace_path << ": cannot write trace\n";
            return kExitInputError;
        }
        write_trace_csv(trace_out, result.trace);
    }
    return kExitOk;
}

int cmd_gen(const GenSpec& spec, const std::string& out_path, std::ostream& err) {
    std::string text;
    try {
        text = generate(spec);
    } catch (const std::invalid_argument& e) {
        err << "gen: " << e.what() << '\n';
        return kExitInputError;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        err << out_path << ": cannot write file\n";
        return kExitInputError;
    }
    out << text;
    return kExitOk;
}

int cmd_bench(const std::string& path, const std::vector<std::string>& engines,
              unsigned repetitions, const EngineConfig& config, const std::string& csv_path,
              std::ostream& out, std::ostream& err) {
    auto system = load_file(path, err);
    if (!system) return kExitInputError;
    DispatchTable table = compile(*system);

    std::ofstream csv;
    if (!csv_path.empty()) {
        csv.open(csv_path);
        if (!csv) {
            err << csv_path << ": cannot write CSV\n";
            return kExitInputError;
        }
        csv << "engine,run,rewrites,micros,terms_per_s,max_width,median_width\n";
    }

    Term reference;  // first engine's normal form; all runs must agree
    std::uint64_t reference_rewrites = 0;
    std::string reference_engine;
    for (const std::string& engine : engines) {
        std::vector<BenchReport> reports;
        for (unsigned rep = 0; rep < repetitions; ++rep) {
            EngineRun result;
            try {
                result = run_engine(*system, table, engine, config);
            } catch (const EngineError& e) {
                err << path << ": " << e.what() << '\n';
                return kExitResourceError;
            }
            if (!reference) {
                reference = result.normal_form;
                reference_rewrites = result.report.total_rewrites;
                reference_engine = engine;
            } else if (!term_equal(reference, result.normal_form) ||
                       reference_rewrites != result.report.total_rewrites) {
                err << "engine divergence on " << path << ":\n  " << reference_engine << ": "
                    << print_term(system->signature, reference) << "  (" << reference_rewrites
                    << " rewrites)\n  " << engine << ": "
                    << print_term(system->signature, result.normal_form) << "  ("
                    << result.report.total_rewrites << " rewrites)\n";
                return kExitDivergence;
            }
            if (csv.is_open()) {
                csv << engine << ',' << rep << ',' << result.report.total_rewrites << ','
                    << result.report.micros << ',' << result.report.terms_per_second << ',';
                if (engine == "sweep")
                    csv << result.report.max_sweep_width << ',' << result.report.median_sweep_width;
                else
                    csv << ',';
                csv << '\n';
            }
            reports.push_back(result.report);
        }
        if (reports.empty()) continue;
        std::sort(reports.begin(), reports.end(), [](const BenchReport& a, const BenchReport& b) {
            return a.terms_per_second < b.terms_per_second;
        });
        const BenchReport& median = reports[reports.size() / 2];
        out << engine << ": median " << static_cast<std::uint64_t>(median.terms_per_second)
            << " rewritten terms/s over " << reports.size() << " run(s), " << median.total_rewrites
            << " rewrites";
        if (engine == "sweep")
            out << ", " << median.sweep_count << " sweeps, max width " << median.max_sweep_width
                << ", median width " << median.median_sweep_width;
        out << '\n';
    }
    return kExitOk;
}

int cmd_dump_dispatch(const std::string& path, std::ostream& out, std::ostream& err) {
    auto system = load_file(path, err);
    if (!system) return kExitInputError;
    out << dump_dispatch(*system, compile(*system));
    return kExitOk;
}

}  // namespace trs
