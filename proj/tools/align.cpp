// align — representational alignment metrics over embedding dumps.
//
//   align run     --manifest M --config C.json --out-dir D
//   align metrics --a A.emb1 --b B.emb1 --metric cka [--k 10]
//
// Exit codes: 0 success, 1 validation/config error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "align/emb_io.hpp"
#include "align/kernel.hpp"
#include "align/neighbors.hpp"
#include "align/report.hpp"
#include "align/svcca.hpp"

namespace {

int run_command(const std::string& manifest, const std::string& config,
                const std::string& out_dir, int threads) {
    align::RunConfig cfg = align::load_run_config(manifest, config);
    if (threads > 0) cfg.threads = static_cast<unsigned>(threads);

    const align::AlignmentReport report = align::run_alignment(cfg);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    auto write_file = [&](const char* name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw align::IoError("cannot open for writing: " + (dir / name).string());
        }
        out << body;
        if (!out) {
            throw align::IoError("failed writing: " + (dir / name).string());
        }
    };
    write_file("report.json", align::emit_json(report));
    write_file("report.csv", align::emit_csv(report));
    write_file("chart.svg", align::emit_svg_bars(report));

    std::cout << "wrote " << (dir / "report.json").string() << ", report.csv, chart.svg ("
              << report.scores.size() << " scores, " << report.aggregates.size()
              << " aggregates)\n";
    return 0;
}

int metrics_command(const std::string& a_path, const std::string& b_path,
                    const std::string& metric_name, int k, double energy_threshold,
                    double ridge) {
    const align::EmbeddingMatrix a = align::read_embeddings_file(a_path);
    const align::EmbeddingMatrix b = align::read_embeddings_file(b_path);
    const align::Metric metric = align::metric_from_name(metric_name);

    align::AlignmentScore score;
    switch (metric) {
        case align::Metric::cka:
            score = align::cka(a, b);
            break;
        case align::Metric::cknna:
            score = align::cknna(a, b, k);
            break;
        case align::Metric::svcca:
            score = align::svcca_score(a, b, align::SvccaConfig{energy_threshold, ridge});
            break;
        default: {
            const std::size_t kk = static_cast<std::size_t>(k);
            const align::NeighborList na = align::knn(a, kk);
            const align::NeighborList nb = align::knn(b, kk);
            if (metric == align::Metric::cycle_knn) score = align::cycle_knn(na, nb);
            if (metric == align::Metric::mutual_knn) score = align::mutual_knn(na, nb);
            if (metric == align::Metric::lcs_knn) score = align::lcs_knn(na, nb);
            if (metric == align::Metric::edit_knn) score = align::edit_knn(na, nb);
            break;
        }
    }
    if (score.degenerate) {
        std::cerr << "warning: degenerate input, score defined as 0\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", score.value);
    std::cout << buf << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"representational alignment metrics"};
    app.require_subcommand(1);

    std::string manifest, config, out_dir;
    int threads = 0;
    CLI::App* run = app.add_subcommand("run", "compute a metric grid over a manifest");
    run->add_option("--manifest", manifest, "dataset manifest JSON")->required();
    run->add_option("--config", config, "run config JSON")->required();
    run->add_option("--out-dir", out_dir, "output directory")->required();
    run->add_option("--threads", threads, "worker threads (default: config value)");

    std::string a_path, b_path, metric_name;
    int k = 10;
    double energy_threshold = 0.99;
    double ridge = 1e-8;
    CLI::App* metrics = app.add_subcommand("metrics", "score one pair of EMB1 files");
    metrics->add_option("--a", a_path, "first EMB1 file")->required();
    metrics->add_option("--b", b_path, "second EMB1 file")->required();
    metrics->add_option("--metric", metric_name, "one of cka cknna svcca cycle_knn mutual_knn lcs_knn edit_knn")
        ->required();
    metrics->add_option("--k", k, "neighbor count for kNN-based metrics");
    metrics->add_option("--energy-threshold", energy_threshold, "svcca retained energy");
    metrics->add_option("--ridge", ridge, "svcca whitening ridge");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            return run_command(manifest, config, out_dir, threads);
        }
        return metrics_command(a_path, b_path, metric_name, k, energy_threshold, ridge);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const align::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const align::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
