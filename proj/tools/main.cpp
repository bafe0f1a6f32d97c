// Batch front-end: degrade, deblur, evaluate and sweep subcommands with
// JSON manifests and CSV reporting. Exit codes: 0 success, 2 validation or
// I/O problem, 3 numerical divergence.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cnchtv/degrade.hpp"
#include "cnchtv/metrics.hpp"
#include "cnchtv/pnm.hpp"
#include "cnchtv/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cnchtv;

namespace {

// Thrown for the machine-parsable failure reasons.
struct CliError {
    std::string reason;
    std::string detail;
};

[[noreturn]] void fail(const std::string& reason, const std::string& detail) {
    throw CliError{reason, detail};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Manifest: JSON file + flag overrides (flags win).

json load_manifest(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) fail("input-not-found", "manifest " + path);
    try {
        return json::parse(in, nullptr, true, true); // allow comments
    } catch (const json::exception& e) {
        fail("format-error", "manifest " + path + ": " + e.what());
    }
}

struct PsfChoice {
    Psf psf = Psf::delta(1);
    json echo; // kind/params or path, raw sum for files
};

PsfChoice resolve_psf(const std::string& spec) {
    if (spec.empty()) fail("bad-arguments", "a PSF (--psf <path|spec>) is required");
    PsfChoice out;
    if (fs::exists(spec)) {
        double raw_sum = 0.0;
        out.psf = load_psf(spec, &raw_sum);
        out.echo = {{"path", spec}, {"pre_normalization_sum", raw_sum}};
        return out;
    }
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    try {
        const std::string kind = parts.at(0);
        if (kind == "delta") {
            const int size = parts.size() > 1 ? std::stoi(parts.at(1)) : 1;
            out.psf = Psf::delta(size);
            out.echo = {{"kind", "delta"}, {"size", size}};
        } else if (kind == "gaussian") {
            const int size = std::stoi(parts.at(1));
            const double std_dev = std::stod(parts.at(2));
            out.psf = make_psf_gaussian(size, std_dev);
            out.echo = {{"kind", "gaussian"}, {"size", size}, {"std", std_dev}};
        } else if (kind == "motion") {
            const int size = std::stoi(parts.at(1));
            const double length = std::stod(parts.at(2));
            const double angle = std::stod(parts.at(3));
            out.psf = make_psf_motion(size, length, angle);
            out.echo = {{"kind", "motion"}, {"size", size}, {"length", length}, {"angle", angle}};
        } else if (kind == "disk") {
            const int size = std::stoi(parts.at(1));
            const double radius = std::stod(parts.at(2));
            out.psf = make_psf_disk(size, radius);
            out.echo = {{"kind", "disk"}, {"size", size}, {"radius", radius}};
        } else {
            fail("bad-psf-spec", spec);
        }
    } catch (const CliError&) {
        throw;
    } catch (const ArgumentError& e) {
        fail("bad-psf-spec", e.what());
    } catch (const std::exception&) {
        fail("bad-psf-spec", spec + " (expected kind:size:params or a file path)");
    }
    return out;
}

ColorImage load_input(const std::string& path) {
    if (path.empty()) fail("bad-arguments", "an input image (--input) is required");
    if (!fs::exists(path)) fail("input-not-found", path);
    return load_pnm(path);
}

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail("io-error", "cannot create output directory " + out);
}

// ---------------------------------------------------------------------------
// Config assembly: noise-profile defaults, then manifest, then flags.

struct Options {
    std::string manifest_path, input, psf_spec, out = ".", ref, test, ref_dir, test_dir;
    std::string image_id, psf_id, method_label, report_path, csv_path, grid_spec;
    double noise = 0.0, mu = 0.0, beta = 0.0, nu1 = 0.0, nu2 = 0.0, tol = 0.0;
    std::uint64_t seed = 0;
    int max_iters = 0, jobs = 0;
    bool baseline_tv = false, debug_zeta = false;

    CLI::App* cmd = nullptr;
    bool given(const std::string& flag) const { return cmd->count(flag) > 0; }
};

double jget(const json& j, const char* key, double fallback) {
    return j.contains(key) && j.at(key).is_number() ? j.at(key).get<double>() : fallback;
}

// Manifests written by `degrade` carry structured noise/psf echoes; accept
// those as inputs alongside the flat form so a run can be replayed from its
// own provenance file.
double manifest_noise_level(const json& m) {
    if (!m.contains("noise")) return 0.0;
    const json& n = m.at("noise");
    if (n.is_number()) return n.get<double>();
    if (n.is_object()) return n.value("level_percent", 0.0);
    return 0.0;
}

std::uint64_t manifest_seed(const json& m) {
    if (m.contains("seed") && m.at("seed").is_number()) {
        return m.at("seed").get<std::uint64_t>();
    }
    if (m.contains("noise") && m.at("noise").is_object()) {
        return m.at("noise").value("seed", std::uint64_t{0});
    }
    return 0;
}

std::string manifest_psf_spec(const json& m, const std::string& fallback) {
    if (!m.contains("psf")) return fallback;
    const json& p = m.at("psf");
    if (p.is_string()) return p.get<std::string>();
    if (p.is_object()) {
        if (p.contains("path")) return p.at("path").get<std::string>();
        const std::string kind = p.value("kind", "");
        const int size = static_cast<int>(jget(p, "size", 13));
        if (kind == "delta") return "delta:" + std::to_string(size);
        if (kind == "gaussian") {
            return "gaussian:" + std::to_string(size) + ":" + fmt(jget(p, "std", 2.0));
        }
        if (kind == "motion") {
            return "motion:" + std::to_string(size) + ":" + fmt(jget(p, "length", 9.0)) + ":" +
                   fmt(jget(p, "angle", 0.0));
        }
        if (kind == "disk") {
            return "disk:" + std::to_string(size) + ":" + fmt(jget(p, "radius", 4.0));
        }
    }
    return fallback;
}

SolverConfig build_solver_config(const Options& opt, const json& manifest, double noise_level,
                                 std::string& method_out) {
    SolverConfig cfg = config_for_noise(noise_level);
    if (manifest.contains("solver")) {
        const json& s = manifest.at("solver");
        cfg.mu = jget(s, "mu", cfg.mu);
        cfg.beta1 = jget(s, "beta1", jget(s, "beta", cfg.beta1));
        cfg.beta2 = jget(s, "beta2", jget(s, "beta", cfg.beta2));
        cfg.beta3 = jget(s, "beta3", jget(s, "beta", cfg.beta3));
        cfg.gamma = jget(s, "gamma", cfg.gamma);
        cfg.box_lo = jget(s, "box_lo", cfg.box_lo);
        cfg.box_hi = jget(s, "box_hi", cfg.box_hi);
        cfg.tol = jget(s, "tol", cfg.tol);
        cfg.max_iters = static_cast<int>(jget(s, "max_iters", cfg.max_iters));
        cfg.inner_sweeps = static_cast<int>(jget(s, "inner_sweeps", cfg.inner_sweeps));
        if (s.contains("fixed_zeta") && !s.at("fixed_zeta").is_null()) {
            cfg.fixed_zeta = s.at("fixed_zeta").get<double>();
        }
        if (s.contains("weights")) {
            const json& w = s.at("weights");
            cfg.weights.kappa = jget(w, "kappa", cfg.weights.kappa);
            cfg.weights.sigma = jget(w, "sigma", cfg.weights.sigma);
            cfg.weights.window = static_cast<int>(jget(w, "window", cfg.weights.window));
            cfg.weights.nu1 = jget(w, "nu1", cfg.weights.nu1);
            cfg.weights.nu2 = jget(w, "nu2", cfg.weights.nu2);
            cfg.weights.eps = jget(w, "eps", cfg.weights.eps);
            if (w.contains("scalar_psi")) cfg.weights.scalar_psi = w.at("scalar_psi").get<bool>();
        }
    }
    if (opt.given("--mu")) cfg.mu = opt.mu;
    if (opt.given("--beta")) cfg.beta1 = cfg.beta2 = cfg.beta3 = opt.beta;
    if (opt.given("--nu1")) cfg.weights.nu1 = opt.nu1;
    if (opt.given("--nu2")) cfg.weights.nu2 = opt.nu2;
    if (opt.given("--tol")) cfg.tol = opt.tol;
    if (opt.given("--max-iters")) cfg.max_iters = opt.max_iters;

    bool baseline = opt.baseline_tv;
    if (!opt.given("--baseline-tv") && manifest.contains("baseline_tv")) {
        baseline = manifest.at("baseline_tv").get<bool>();
    }
    if (baseline) {
        cfg.weights.nu1 = cfg.weights.nu2 = 1.0;
        cfg.fixed_zeta = 1.0;
        method_out = "convex-TV baseline";
    } else {
        method_out = "CNCHTV";
    }
    return cfg;
}

json config_echo(const SolverConfig& cfg, const std::string& method) {
    return {
        {"method", method},
        {"mu", cfg.mu},
        {"beta1", cfg.beta1},
        {"beta2", cfg.beta2},
        {"beta3", cfg.beta3},
        {"gamma", cfg.gamma},
        {"box", {cfg.box_lo, cfg.box_hi}},
        {"tol", cfg.tol},
        {"max_iters", cfg.max_iters},
        {"inner_sweeps", cfg.inner_sweeps},
        {"fixed_zeta", cfg.fixed_zeta ? json(*cfg.fixed_zeta) : json(nullptr)},
        {"weights",
         {{"kappa", cfg.weights.kappa},
          {"sigma", cfg.weights.sigma},
          {"window", cfg.weights.window},
          {"nu1", cfg.weights.nu1},
          {"nu2", cfg.weights.nu2},
          {"eps", cfg.weights.eps},
          {"scalar_psi", cfg.weights.scalar_psi}}},
    };
}

json report_to_json(const SolverReport& r) {
    json res_v = json::array(), res_w = json::array(), res_u = json::array();
    for (const auto& t : r.primal_residuals) {
        res_v.push_back(t[0]);
        res_w.push_back(t[1]);
        res_u.push_back(t[2]);
    }
    return {
        {"iterations", r.iterations},     {"exit_reason", r.exit_reason},
        {"final_gap", r.final_gap},       {"wall_time_s", r.wall_time_s},
        {"objective", r.objective_trace}, {"residual_v", res_v},
        {"residual_w", res_w},            {"residual_u", res_u},
    };
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("io-error", "cannot write " + path);
    out << j.dump(2) << "\n";
}

// Linear rescale to [0,255] for a viewable map; constant maps go to 0.
Image rescale_for_pgm(const Image& m) {
    const double lo = m.minCoeff(), hi = m.maxCoeff();
    if (hi <= lo) return Image::Zero(m.rows(), m.cols());
    return (m - lo) * (255.0 / (hi - lo));
}

void dump_raw(const Image& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("io-error", "cannot write " + path);
    out.precision(12);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            out << m(i, j) << (j + 1 < m.cols() ? ' ' : '\n');
        }
    }
}

// ---------------------------------------------------------------------------
// degrade

int cmd_degrade(const Options& opt, const json& manifest) {
    const std::string input = opt.given("--input") ? opt.input : manifest.value("input", opt.input);
    const std::string psf_spec =
        opt.given("--psf") ? opt.psf_spec : manifest_psf_spec(manifest, opt.psf_spec);
    NoiseSpec noise;
    noise.level_percent = opt.given("--noise") ? opt.noise : manifest_noise_level(manifest);
    noise.seed = opt.given("--seed") ? opt.seed : manifest_seed(manifest);

    const ColorImage f = load_input(input);
    const PsfChoice psf = resolve_psf(psf_spec);
    ensure_out_dir(opt.out);

    const ColorImage g = degrade(f, psf.psf, noise);
    const std::string degraded_path = opt.out + "/degraded" + (f.gray() ? ".pgm" : ".ppm");
    save_pnm(g, degraded_path);
    save_psf(psf.psf, opt.out + "/psf.txt");

    const json echo = {
        {"command", "degrade"},
        {"input", input},
        {"psf", psf.echo},
        {"noise",
         {{"level_percent", noise.level_percent},
          {"seed", noise.seed},
          {"generator", kNoiseGenerator}}},
        {"outputs", {{"degraded", degraded_path}, {"psf", opt.out + "/psf.txt"}}},
    };
    write_json(echo, opt.out + "/manifest.json");
    std::cout << "wrote " << degraded_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// deblur

int cmd_deblur(const Options& opt, const json& manifest) {
    const std::string input = opt.given("--input") ? opt.input : manifest.value("input", opt.input);
    const std::string psf_spec =
        opt.given("--psf") ? opt.psf_spec : manifest_psf_spec(manifest, opt.psf_spec);
    const double noise_level =
        opt.given("--noise") ? opt.noise : manifest_noise_level(manifest);
    const bool debug_zeta =
        opt.debug_zeta ||
        (manifest.contains("debug_zeta") && manifest.at("debug_zeta").get<bool>());

    const ColorImage g = load_input(input);
    const PsfChoice psf = resolve_psf(psf_spec);
    ensure_out_dir(opt.out);

    std::string method;
    const SolverConfig cfg = build_solver_config(opt, manifest, noise_level, method);

    json report = {
        {"command", "deblur"},          {"input", input},
        {"psf", psf.echo},              {"noise_percent", noise_level},
        {"config", config_echo(cfg, method)},
    };

    ColorImage restored;
    json planes = json::array();
    try {
        for (size_t p = 0; p < g.planes.size(); ++p) {
            IterationCallback cb;
            Image last_psi1, last_psi2;
            if (debug_zeta) {
                cb = [&, p](const SolverState& st, const IterationStats& stats) {
                    char name[64];
                    std::snprintf(name, sizeof name, "/zeta_p%zu_iter%03d", p, stats.iter);
                    save_pnm(rescale_for_pgm(st.zeta), opt.out + name + ".pgm");
                    dump_raw(st.zeta, opt.out + name + ".txt");
                    last_psi1 = st.psi1;
                    last_psi2 = st.psi2;
                };
            }
            SolverReport rep = deblur(g.planes[p], psf.psf, cfg, cb);
            if (debug_zeta && last_psi1.size() > 0) {
                for (const auto& [map, tag] :
                     {std::pair<const Image&, const char*>{last_psi1, "psi1"},
                      {last_psi2, "psi2"}}) {
                    char name[64];
                    std::snprintf(name, sizeof name, "/%s_p%zu_final", tag, p);
                    save_pnm(rescale_for_pgm(map), opt.out + name + ".pgm");
                    dump_raw(map, opt.out + name + ".txt");
                }
            }
            restored.planes.push_back(rep.restored);
            planes.push_back(report_to_json(rep));
        }
    } catch (const DivergenceError& e) {
        planes.push_back(report_to_json(e.partial));
        report["planes"] = planes;
        report["error"] = {
            {"reason", "divergence"}, {"iteration", e.iteration}, {"detail", e.what()}};
        const std::string path = opt.out + "/report.json";
        write_json(report, path);
        std::cerr << "error: divergence: " << e.what() << " (report: " << path << ")\n";
        return 3;
    }

    const std::string restored_path = opt.out + "/restored" + (g.gray() ? ".pgm" : ".ppm");
    save_pnm(restored, restored_path);
    report["planes"] = planes;
    report["outputs"] = {{"restored", restored_path}};
    write_json(report, opt.out + "/report.json");
    std::cout << "wrote " << restored_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct CsvRow {
    std::string image_id, psf_id, method;
    double noise_percent = 0.0, mssim_v = 0.0, psnr_v = 0.0, wall_time_s = 0.0;
    int iterations = 0;

    std::string str() const {
        std::ostringstream os;
        os << image_id << ',' << psf_id << ',' << fmt(noise_percent) << ',' << method << ','
           << fmt(mssim_v) << ',' << fmt(psnr_v) << ',' << iterations << ',' << fmt(wall_time_s);
        return os.str();
    }
};

CsvRow evaluate_pair(const std::string& ref_path, const std::string& test_path,
                     const Options& opt) {
    if (!fs::exists(ref_path)) fail("input-not-found", ref_path);
    if (!fs::exists(test_path)) fail("input-not-found", test_path);
    const ColorImage ref = load_pnm(ref_path);
    const ColorImage test = load_pnm(test_path);
    if (ref.width() != test.width() || ref.height() != test.height() ||
        ref.planes.size() != test.planes.size()) {
        fail("dimension-mismatch", ref_path + " vs " + test_path);
    }
    CsvRow row;
    row.image_id = opt.image_id.empty() ? fs::path(test_path).stem().string() : opt.image_id;
    row.psf_id = opt.psf_id;
    row.noise_percent = opt.noise;
    row.method = opt.method_label;
    row.mssim_v = mssim(ref, test);
    row.psnr_v = psnr(ref, test);
    if (!opt.report_path.empty()) {
        std::ifstream in(opt.report_path);
        if (!in) fail("input-not-found", opt.report_path);
        const json rep = json::parse(in, nullptr, true, true);
        for (const json& plane : rep.value("planes", json::array())) {
            row.iterations = std::max(row.iterations, plane.value("iterations", 0));
            row.wall_time_s += plane.value("wall_time_s", 0.0);
        }
        if (row.method.empty() && rep.contains("config")) {
            row.method = rep.at("config").value("method", "");
        }
    }
    return row;
}

void emit_rows(const std::vector<CsvRow>& rows, const std::string& csv_path) {
    std::ostringstream os;
    os << kBenchmarkCsvHeader << "\n";
    for (const CsvRow& r : rows) os << r.str() << "\n";
    std::cout << os.str();
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) fail("io-error", "cannot write " + csv_path);
        out << os.str();
    }
}

int cmd_evaluate(const Options& opt, const json& manifest) {
    std::vector<CsvRow> rows;
    if (!opt.ref_dir.empty() || !opt.test_dir.empty()) {
        if (opt.ref_dir.empty() || opt.test_dir.empty()) {
            fail("bad-arguments", "batch mode needs both --ref-dir and --test-dir");
        }
        if (!fs::is_directory(opt.ref_dir)) fail("input-not-found", opt.ref_dir);
        if (!fs::is_directory(opt.test_dir)) fail("input-not-found", opt.test_dir);
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(opt.test_dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (fs::exists(fs::path(opt.ref_dir) / name)) names.push_back(name);
        }
        std::sort(names.begin(), names.end());
        for (const std::string& name : names) {
            Options per = opt;
            per.image_id = fs::path(name).stem().string();
            rows.push_back(evaluate_pair((fs::path(opt.ref_dir) / name).string(),
                                         (fs::path(opt.test_dir) / name).string(), per));
        }
        std::sort(rows.begin(), rows.end(),
                  [](const CsvRow& a, const CsvRow& b) { return a.image_id < b.image_id; });
    } else {
        const std::string ref = opt.given("--ref") ? opt.ref : manifest.value("ref", opt.ref);
        const std::string test = opt.given("--test") ? opt.test : manifest.value("test", opt.test);
        if (ref.empty() || test.empty()) fail("bad-arguments", "--ref and --test are required");
        rows.push_back(evaluate_pair(ref, test, opt));
    }
    emit_rows(rows, opt.csv_path);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

std::vector<double> parse_grid_values(const std::string& spec) {
    std::vector<double> vals;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) vals.push_back(std::stod(item));
    }
    return vals;
}

int cmd_sweep(const Options& opt, const json& manifest) {
    const std::string input = opt.given("--input") ? opt.input : manifest.value("input", opt.input);
    const std::string psf_spec =
        opt.given("--psf") ? opt.psf_spec : manifest_psf_spec(manifest, opt.psf_spec);
    const double noise_level =
        opt.given("--noise") ? opt.noise : manifest_noise_level(manifest);
    const NoiseSpec noise{noise_level,
                          opt.given("--seed") ? opt.seed : manifest_seed(manifest)};

    const ColorImage truth_color = load_input(input);
    if (!truth_color.gray()) fail("bad-arguments", "sweep expects a single-plane image");
    const Image& truth = truth_color.planes.front();
    const PsfChoice psf = resolve_psf(psf_spec);
    ensure_out_dir(opt.out);

    std::vector<std::pair<double, double>> grid;
    if (manifest.contains("sweep_grid")) {
        for (const json& cell : manifest.at("sweep_grid")) {
            grid.emplace_back(cell.at(0).get<double>(), cell.at(1).get<double>());
        }
    } else {
        std::vector<double> axis = {0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 1.0};
        if (!opt.grid_spec.empty()) axis = parse_grid_values(opt.grid_spec);
        for (double a : axis) {
            for (double b : axis) grid.emplace_back(a, b);
        }
    }
    if (grid.empty()) fail("bad-arguments", "sweep grid is empty");

    const Image degraded = degrade(truth, psf.psf, noise);

    std::string method;
    const SolverConfig base_cfg = build_solver_config(opt, manifest, noise_level, method);

    struct Cell {
        double nu1 = 0.0, nu2 = 0.0, score = 0.0;
        bool ok = false;
        int iterations = 0;
    };
    std::vector<Cell> cells(grid.size());
    const int jobs =
        opt.jobs > 0 ? opt.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t k; (k = next.fetch_add(1)) < grid.size();) {
            Cell& cell = cells[k];
            cell.nu1 = grid[k].first;
            cell.nu2 = grid[k].second;
            SolverConfig cfg = base_cfg;
            cfg.weights.nu1 = cell.nu1;
            cfg.weights.nu2 = cell.nu2;
            try {
                const SolverReport rep = deblur(degraded, psf.psf, cfg);
                cell.score = mssim(truth, rep.restored);
                cell.iterations = rep.iterations;
                cell.ok = true;
            } catch (const DivergenceError&) {
                cell.ok = false; // recorded as a row, run continues
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t + 1 < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return a.nu1 != b.nu1 ? a.nu1 < b.nu1 : a.nu2 < b.nu2;
    });

    std::ostringstream csv;
    csv << "nu1,nu2,mssim,status\n";
    const Cell* best = nullptr;
    for (const Cell& c : cells) {
        csv << fmt(c.nu1) << ',' << fmt(c.nu2) << ',' << (c.ok ? fmt(c.score) : std::string())
            << ',' << (c.ok ? "ok" : "diverged") << "\n";
        if (c.ok && (!best || c.score > best->score)) best = &c;
    }
    std::cout << csv.str();
    std::ofstream out(opt.out + "/sweep.csv");
    if (!out) fail("io-error", "cannot write " + opt.out + "/sweep.csv");
    out << csv.str();

    json summary = {
        {"command", "sweep"},
        {"input", input},
        {"psf", psf.echo},
        {"noise",
         {{"level_percent", noise.level_percent},
          {"seed", noise.seed},
          {"generator", kNoiseGenerator}}},
        {"config", config_echo(base_cfg, method)},
        {"cells", grid.size()},
    };
    if (best) {
        summary["argmax"] = {{"nu1", best->nu1}, {"nu2", best->nu2}, {"mssim", best->score}};
        std::cout << "argmax: nu1=" << fmt(best->nu1) << " nu2=" << fmt(best->nu2)
                  << " mssim=" << fmt(best->score) << "\n";
    }
    write_json(summary, opt.out + "/sweep_summary.json");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CNCHTV deblurring toolkit"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--manifest", opt.manifest_path, "JSON manifest; flags override");
        cmd->add_option("--out", opt.out, "output directory");
        cmd->add_option("--seed", opt.seed, "noise seed");
        cmd->add_option("--psf", opt.psf_spec, "PSF file or spec kind:size:params");
        cmd->add_option("--noise", opt.noise, "noise level in percent of the 255 range");
        cmd->add_option("--mu", opt.mu, "fidelity weight");
        cmd->add_option("--beta", opt.beta, "penalty for all three splits");
        cmd->add_option("--nu1", opt.nu1, "first-order exponent");
        cmd->add_option("--nu2", opt.nu2, "second-order exponent");
        cmd->add_option("--tol", opt.tol, "relative-change stopping threshold");
        cmd->add_option("--max-iters", opt.max_iters, "iteration cap");
        cmd->add_flag("--baseline-tv", opt.baseline_tv, "convex TV baseline (nu=1, zeta=1)");
        cmd->add_flag("--debug-zeta", opt.debug_zeta, "write zeta maps per outer iteration");
        return cmd;
    };

    CLI::App* c_degrade = add_common(app.add_subcommand("degrade", "blur + noise an image"));
    c_degrade->add_option("--input", opt.input, "clean input image (PGM/PPM)");

    CLI::App* c_deblur = add_common(app.add_subcommand("deblur", "restore a degraded image"));
    c_deblur->add_option("--input", opt.input, "degraded input image (PGM/PPM)");

    CLI::App* c_eval = add_common(app.add_subcommand("evaluate", "score test against reference"));
    c_eval->add_option("--ref", opt.ref, "reference image");
    c_eval->add_option("--test", opt.test, "image under test");
    c_eval->add_option("--ref-dir", opt.ref_dir, "reference directory (batch)");
    c_eval->add_option("--test-dir", opt.test_dir, "test directory (batch)");
    c_eval->add_option("--image-id", opt.image_id, "CSV image_id override");
    c_eval->add_option("--psf-id", opt.psf_id, "CSV psf_id");
    c_eval->add_option("--method", opt.method_label, "CSV method label");
    c_eval->add_option("--report", opt.report_path, "deblur report.json for iterations/time");
    c_eval->add_option("--csv", opt.csv_path, "also write rows to this CSV file");

    CLI::App* c_sweep = add_common(app.add_subcommand("sweep", "grid of (nu1,nu2) deblur runs"));
    c_sweep->add_option("--input", opt.input, "clean input image; degraded internally");
    c_sweep->add_option("--grid", opt.grid_spec, "comma-separated nu values for both axes");
    c_sweep->add_option("--jobs", opt.jobs, "parallel cells (default: hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: bad-arguments: " << e.what() << "\n";
        return 2;
    }

    try {
        opt.cmd = app.get_subcommands().front();
        const json manifest = load_manifest(opt.manifest_path);
        if (opt.cmd == c_degrade) return cmd_degrade(opt, manifest);
        if (opt.cmd == c_deblur) return cmd_deblur(opt, manifest);
        if (opt.cmd == c_eval) return cmd_evaluate(opt, manifest);
        if (opt.cmd == c_sweep) return cmd_sweep(opt, manifest);
        std::cerr << "error: bad-arguments: unknown subcommand\n";
        return 2;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.reason << ": " << e.detail << "\n";
        return 2;
    } catch (const DivergenceError& e) {
        std::cerr << "error: divergence: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: invalid-input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 2;
    }
}
