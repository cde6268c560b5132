// lsek: subgraph entropy embeddings, kernels and classification from the
// command line. Run `lsek --help` or `lsek <subcommand> --help`.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsek/catalog.hpp"
#include "lsek/census.hpp"
#include "lsek/cross_validation.hpp"
#include "lsek/embedding.hpp"
#include "lsek/error.hpp"
#include "lsek/finnet.hpp"
#include "lsek/io.hpp"
#include "lsek/kernel.hpp"
#include "lsek/kpca.hpp"
#include "lsek/log.hpp"
#include "lsek/pipeline.hpp"
#include "lsek/tudataset.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace lsek;

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

// Bad flag values or config entries found after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    // inputs
    std::string input;
    std::string name;
    std::string gram_file;

    // shared
    std::string topologies;
    std::string out;
    std::string format;
    std::string run_log;
    std::string config;
    std::size_t jobs = 0;

    // thermo
    ThermoParams params;
    std::string mode = "closed";
    std::string stirling = "leading";
    bool standardize = false;

    // kernel
    std::string kernel = "linear";
    double gamma = 0.0;
    int degree = 3;
    double coef0 = 0.0;
    double alpha = 1.0;

    // kpca
    std::size_t components = 3;

    // classify
    std::size_t folds = 10;
    std::uint64_t seed = 42;
    std::vector<double> c_grid{0.01, 0.1, 1.0, 10.0, 100.0};
    std::size_t repeats = 1;
    std::size_t inner_folds = 3;
    double tol = 1e-3;

    // finnet
    std::size_t window = 28;
    double quantile = 0.05;
    bool returns = false;
    std::string fill = "reject";
    std::string alignment = "inclusive";
    std::string labels = "uniform";
    bool aggregate = false;
    double z_threshold = 3.0;
    std::size_t baseline = 28;

    EmbeddingOptions embedding() const {
        EmbeddingOptions o;
        o.params = params;
        o.mode = mode == "mayer" ? EntropyMode::mayer : EntropyMode::closed;
        o.stirling = stirling == "improved" ? StirlingMode::improved : StirlingMode::leading;
        return o;
    }

    BaseKernelSpec kernel_spec() const {
        BaseKernelSpec k;
        k.kind = parse_kernel_kind(kernel);
        k.gamma = gamma;
        k.degree = degree;
        k.coef0 = coef0;
        k.alpha = alpha;
        return k;
    }
};

void add_dataset(CLI::App* app, Settings& s) {
    app->add_option("dataset", s.input, "TUDataset directory (NAME_A.txt, NAME_graph_indicator.txt, ...)");
    app->add_option("--name", s.name, "Dataset file prefix (default: directory name)");
}

void add_output(CLI::App* app, Settings& s, const std::vector<std::string>& formats) {
    app->add_option("-o,--out", s.out, "Output file (default: standard output)");
    app->add_option("--format", s.format, "Output format (default " + formats.front() + ")")
        ->check(CLI::IsMember(formats));
    app->add_option("--run-log", s.run_log, "Where to write the config echo (default: <out>.run.json)");
    app->add_option("--config", s.config, "Config file (JSON object or key=value lines); flags win");
    app->add_option("-j,--jobs", s.jobs, "Worker threads (0 = all cores)");
}

void add_topologies(CLI::App* app, Settings& s, const std::string& fallback) {
    app->add_option("--topologies", s.topologies,
                     "Topology mask: all, small (ids 1-8), include=<ids>, exclude=<ids> (default " + fallback + ")");
}

void add_thermo(CLI::App* app, Settings& s, bool standardize = true) {
    auto* g = app->add_option_group("thermo", "Entropy parameters");
    g->add_option("--beta", s.params.beta, "Inverse temperature")->capture_default_str();
    g->add_option("--prefactor", s.params.prefactor, "p in epsilon = p e^beta + R")->capture_default_str();
    g->add_option("--r-min", s.params.r_min, "Radial grid start")->capture_default_str();
    g->add_option("--r-max", s.params.r_max, "Radial grid end")->capture_default_str();
    g->add_option("--delta-r", s.params.delta_r, "Radial grid step")->capture_default_str();
    g->add_option("--sigma", s.params.sigma, "Pair potential length scale (mayer mode)")->capture_default_str();
    g->add_option("--well-depth", s.params.well_depth, "Pair potential depth (mayer mode)")->capture_default_str();
    g->add_option("--mode", s.mode, "Edge integral: closed or mayer")
        ->check(CLI::IsMember({"closed", "mayer"}))
        ->capture_default_str();
    g->add_option("--stirling", s.stirling, "Stirling approximation: leading (n ln n) or improved")
        ->check(CLI::IsMember({"leading", "improved"}))
        ->capture_default_str();
    if (standardize) app->add_flag("--standardize", s.standardize, "Standardize embedding coordinates across the dataset");
}

void add_kernel(CLI::App* app, Settings& s) {
    auto* g = app->add_option_group("kernel", "Base kernel");
    g->add_option("--kernel", s.kernel, "linear, rbf, polynomial or sigmoid")
        ->check(CLI::IsMember({"linear", "rbf", "polynomial", "sigmoid"}))
        ->capture_default_str();
    g->add_option("--gamma", s.gamma, "rbf width (0 = 1/dimension)")->capture_default_str();
    g->add_option("--degree", s.degree, "polynomial degree")->capture_default_str();
    g->add_option("--coef0", s.coef0, "polynomial/sigmoid offset")->capture_default_str();
    g->add_option("--alpha", s.alpha, "sigmoid slope")->capture_default_str();
}

// Fills options the command line left unset from a JSON object or a
// key=value file. Keys are long option names without dashes.
void apply_config(CLI::App* app, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::vector<std::pair<std::string, std::vector<std::string>>> entries;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw FormatError("config " + path + ": " + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            std::vector<std::string> values;
            auto scalar = [&](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
            if (value.is_array()) {
                for (const auto& v : value) values.push_back(scalar(v));
            } else {
                values.push_back(scalar(value));
            }
            entries.emplace_back(key, values);
        }
    } else {
        std::istringstream lines(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            auto trimmed = std::string(detail::trim(line));
            if (trimmed.empty() || trimmed[0] == '#') continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw FormatError("config " + path + ":" + std::to_string(line_no) + ": expected key=value");
            entries.push_back({std::string(detail::trim(std::string_view(trimmed).substr(0, eq))),
                               {std::string(detail::trim(std::string_view(trimmed).substr(eq + 1)))}});
        }
    }

    for (auto& [key, values] : entries) {
        std::string flag = key;
        for (char& c : flag)
            if (c == '_') c = '-';
        CLI::Option* opt = app->get_option_no_throw("--" + flag);
        if (!opt) opt = app->get_option_no_throw(flag);
        if (!opt) throw UsageError("config " + path + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        for (const auto& v : values) opt->add_result(v);
        opt->run_callback();
    }
}

GraphDataset load_dataset(const Settings& s) {
    if (s.input.empty()) throw UsageError("missing dataset directory");
    return s.name.empty() ? parse_tudataset(s.input) : parse_tudataset(s.input, s.name);
}

TopologyMask mask_of(const Settings& s) {
    try {
        return TopologyMask::parse(s.topologies);
    } catch (const ContractError& e) {
        throw UsageError(std::string("--topologies: ") + e.what());
    }
}

void echo_thermo(const Settings& s) {
    const auto o = s.embedding();
    const double eps = edge_integral(o.params, o.mode);
    std::cerr << "epsilon=" << io::number(eps) << " R=" << io::number(o.params.radial_offset())
              << " beta=" << io::number(o.params.beta) << " mode=" << s.mode << '\n';
}

json config_echo(const std::string& subcommand, const Settings& s) {
    json j;
    j["subcommand"] = subcommand;
    j["input"] = s.input.empty() ? s.gram_file : s.input;
    if (!s.name.empty()) j["name"] = s.name;
    if (subcommand != "catalog" && subcommand != "census") {
        j["thermo"] = io::to_json(s.params);
        j["mode"] = s.mode;
        j["stirling"] = s.stirling;
        if (subcommand != "finnet") j["standardize"] = s.standardize;
    }
    j["topologies"] = mask_of(s).to_string();
    if (subcommand == "gram" || subcommand == "kpca" || subcommand == "classify")
        j["kernel"] = io::to_json(s.kernel_spec());
    if (subcommand == "kpca") j["components"] = s.components;
    if (subcommand == "classify") {
        j["folds"] = s.folds;
        j["seed"] = s.seed;
        j["C_grid"] = s.c_grid;
        j["repeats"] = s.repeats;
        j["inner_folds"] = s.inner_folds;
        j["tol"] = s.tol;
    }
    if (subcommand == "finnet") {
        j["window"] = s.window;
        j["quantile"] = s.quantile;
        j["returns"] = s.returns;
        j["fill"] = s.fill;
        j["alignment"] = s.alignment;
        j["labels"] = s.labels;
        j["aggregate"] = s.aggregate;
        j["z_threshold"] = s.z_threshold;
        j["baseline"] = s.baseline;
    }
    j["out"] = s.out;
    j["format"] = s.format;
    j["jobs"] = s.jobs;
    return j;
}

// Opens --out (or stdout) and writes the config echo next to it.
class Output {
public:
    Output(const std::string& subcommand, const Settings& s) {
        const std::string echo = config_echo(subcommand, s).dump(2) + "\n";
        if (!s.out.empty()) {
            file_ = std::make_unique<std::ofstream>(s.out, std::ios::binary);
            if (!*file_) throw IngestError("cannot write " + s.out);
        }
        const std::string log_path = !s.run_log.empty() ? s.run_log : s.out.empty() ? "" : s.out + ".run.json";
        if (log_path.empty()) {
            std::cerr << "config: " << config_echo(subcommand, s).dump() << '\n';
        } else {
            std::ofstream log(log_path, std::ios::binary);
            if (!log) throw IngestError("cannot write " + log_path);
            log << echo;
        }
    }

    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<EntropyEmbedding> dataset_embeddings(const Settings& s, const GraphDataset& ds) {
    auto out = embed_all(ds, mask_of(s), s.embedding(), s.standardize, s.jobs);
    echo_thermo(s);
    return out;
}

int run_catalog(const Settings& s) {
    Output out("catalog", s);
    auto& os = out.stream();
    os << "type_id,name,nodes,edges,root\n";
    for (const auto& e : catalog())
        os << e.type_id << ',' << e.name << ',' << e.nodes << ',' << e.edge_count() << ',' << e.root_description << '\n';
    return 0;
}

int run_census(const Settings& s) {
    const auto ds = load_dataset(s);
    const auto mask = mask_of(s);
    const auto tables = census_all(ds, mask, s.jobs);
    Output out("census", s);
    io::write_census_csv(out.stream(), tables, ds.label_values, mask);
    return 0;
}

int run_embed(const Settings& s) {
    const auto ds = load_dataset(s);
    const auto embeddings = dataset_embeddings(s, ds);
    Output out("embed", s);
    io::write_embeddings_csv(out.stream(), embeddings, ds.label_values);
    return 0;
}

int run_gram(const Settings& s) {
    const auto ds = load_dataset(s);
    const auto g = gram(dataset_embeddings(s, ds), s.kernel_spec(), s.jobs);
    Output out("gram", s);
    if (s.format == "json") io::write_gram_json(out.stream(), g);
    else if (s.format == "libsvm") io::write_gram_libsvm(out.stream(), g, ds.class_labels);
    else io::write_gram_csv(out.stream(), g);
    return 0;
}

int run_kpca(const Settings& s) {
    const auto ds = load_dataset(s);
    const auto g = gram(dataset_embeddings(s, ds), s.kernel_spec(), s.jobs);
    const auto r = kpca(g, s.components);
    std::cerr << "explained variance:";
    for (double v : r.explained_ratio) std::cerr << ' ' << io::number(v);
    std::cerr << '\n';
    Output out("kpca", s);
    io::write_kpca_csv(out.stream(), r, ds.class_labels);
    return 0;
}

int run_classify(const Settings& s) {
    Eigen::MatrixXd values;
    std::vector<long long> classes;
    if (!s.gram_file.empty()) {
        if (!s.input.empty()) throw UsageError("give either a dataset or --gram, not both");
        std::ifstream in(s.gram_file);
        if (!in) throw IngestError("cannot open " + s.gram_file);
        auto g = io::read_gram_libsvm(in, s.gram_file);
        values = std::move(g.values);
        classes = std::move(g.labels);
    } else {
        const auto ds = load_dataset(s);
        values = gram(dataset_embeddings(s, ds), s.kernel_spec(), s.jobs).values;
        classes = ds.class_labels;
    }
    CvOptions options;
    options.folds = s.folds;
    options.c_grid = s.c_grid;
    options.seed = s.seed;
    options.inner_folds = s.inner_folds;
    options.tol = s.tol;
    options.jobs = s.jobs;
    const auto reports = repeated_cross_validate(values, classes, options, s.repeats);

    Output out("classify", s);
    if (s.format == "table") {
        io::write_cv_table(out.stream(), reports);
        return 0;
    }
    json j;
    j["input"] = s.input.empty() ? s.gram_file : s.input;
    j["topologies"] = mask_of(s).to_string();
    j["kernel"] = io::to_json(s.kernel_spec());
    j["folds"] = s.folds;
    j["C_grid"] = s.c_grid;
    double mean = 0.0;
    auto list = json::array();
    for (const auto& r : reports) {
        list.push_back(io::to_json(r));
        mean += r.mean / static_cast<double>(reports.size());
    }
    j["reports"] = std::move(list);
    j["mean_accuracy"] = mean;
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int run_finnet(const Settings& s) {
    if (s.input.empty()) throw UsageError("missing price CSV");
    const auto prices = ingest_prices(s.input, s.fill == "forward_fill" ? FillPolicy::forward_fill : FillPolicy::reject);
    WindowOptions w;
    w.window = s.window;
    w.quantile = s.quantile;
    w.returns = s.returns;
    w.alignment = s.alignment == "preceding" ? WindowAlignment::preceding : WindowAlignment::inclusive;
    w.labeling = s.labels == "terciles" ? NodeLabeling::degree_terciles : NodeLabeling::uniform;
    w.jobs = s.jobs;
    const auto series = build_windows(prices, w);
    const auto entropies = entropy_series(series, mask_of(s), s.embedding(), s.jobs);
    echo_thermo(s);
    std::vector<std::vector<bool>> flags;
    for (const auto& values : entropies.subgraph) flags.push_back(flag_changes(values, s.z_threshold, s.baseline));
    if (s.aggregate) flags.push_back(flag_changes(entropies.total(), s.z_threshold, s.baseline));
    Output out("finnet", s);
    io::write_entropy_series_csv(out.stream(), entropies, flags, s.aggregate);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Labeled subgraph entropy kernel toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lsek 0.1.0");
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to standard error");
    app.add_flag("-q,--quiet", quiet, "Only report errors");

    Settings s;

    auto* catalog_cmd = app.add_subcommand("catalog", "List the graphlet topologies");
    add_output(catalog_cmd, s, {"csv"});

    auto* census_cmd = app.add_subcommand("census", "Labeled graphlet census of every graph");
    add_dataset(census_cmd, s);
    add_topologies(census_cmd, s, "all");
    add_output(census_cmd, s, {"csv"});

    auto* embed_cmd = app.add_subcommand("embed", "Subgraph entropy embeddings");
    add_dataset(embed_cmd, s);
    add_topologies(embed_cmd, s, "all");
    add_thermo(embed_cmd, s);
    add_output(embed_cmd, s, {"csv"});

    auto* gram_cmd = app.add_subcommand("gram", "Kernel (Gram) matrix over entropy embeddings");
    add_dataset(gram_cmd, s);
    add_topologies(gram_cmd, s, "all");
    add_thermo(gram_cmd, s);
    add_kernel(gram_cmd, s);
    add_output(gram_cmd, s, {"csv", "json", "libsvm"});

    auto* kpca_cmd = app.add_subcommand("kpca", "Kernel PCA coordinates");
    add_dataset(kpca_cmd, s);
    add_topologies(kpca_cmd, s, "all");
    add_thermo(kpca_cmd, s);
    add_kernel(kpca_cmd, s);
    kpca_cmd->add_option("-k,--components", s.components, "Number of components")->capture_default_str();
    add_output(kpca_cmd, s, {"csv"});

    auto* classify_cmd = app.add_subcommand("classify", "C-SVM with stratified cross-validation");
    add_dataset(classify_cmd, s);
    classify_cmd->add_option("--gram", s.gram_file, "Precomputed kernel (libsvm text) instead of a dataset");
    add_topologies(classify_cmd, s, "all");
    add_thermo(classify_cmd, s);
    add_kernel(classify_cmd, s);
    classify_cmd->add_option("--folds", s.folds, "Outer folds")->capture_default_str();
    classify_cmd->add_option("--seed", s.seed, "Fold shuffling seed")->capture_default_str();
    classify_cmd->add_option("--C", s.c_grid, "C grid, comma separated")->delimiter(',')->capture_default_str();
    classify_cmd->add_option("--repeats", s.repeats, "Repetitions with seeds seed, seed+1, ...")->capture_default_str();
    classify_cmd->add_option("--inner-folds", s.inner_folds, "Folds of the nested C search")->capture_default_str();
    classify_cmd->add_option("--tol", s.tol, "SMO KKT tolerance")->capture_default_str();
    add_output(classify_cmd, s, {"json", "table"});

    auto* finnet_cmd = app.add_subcommand("finnet", "Entropy series of sliding-window correlation networks");
    finnet_cmd->add_option("prices", s.input, "Price CSV: date column, then one column per ticker");
    finnet_cmd->add_option("--window", s.window, "Window length in days")->capture_default_str();
    finnet_cmd->add_option("--quantile", s.quantile, "Fraction of pairs kept as edges")->capture_default_str();
    finnet_cmd->add_flag("--returns", s.returns, "Correlate daily log returns instead of prices");
    finnet_cmd->add_option("--fill", s.fill, "Gap policy: reject or forward_fill")
        ->check(CLI::IsMember({"reject", "forward_fill"}))
        ->capture_default_str();
    finnet_cmd->add_option("--alignment", s.alignment, "inclusive (t-w+1..t) or preceding (t-w..t-1)")
        ->check(CLI::IsMember({"inclusive", "preceding"}))
        ->capture_default_str();
    finnet_cmd->add_option("--labels", s.labels, "Node labels: uniform or terciles (degree bands)")
        ->check(CLI::IsMember({"uniform", "terciles"}))
        ->capture_default_str();
    finnet_cmd->add_flag("--aggregate", s.aggregate, "Also emit the sum over topologies as topology 'all'");
    finnet_cmd->add_option("--z", s.z_threshold, "Change flag threshold in trailing standard deviations")
        ->capture_default_str();
    finnet_cmd->add_option("--baseline", s.baseline, "Trailing baseline length for change flags")->capture_default_str();
    add_topologies(finnet_cmd, s, "small");
    add_thermo(finnet_cmd, s, false);
    add_output(finnet_cmd, s, {"csv"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }
    if (verbose) log::set_level(log::Level::info);
    if (quiet) log::set_level(log::Level::quiet);

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        if (!s.config.empty()) apply_config(sub, s.config);
        if (s.topologies.empty()) s.topologies = name == "finnet" ? "small" : "all";
        if (s.format.empty()) s.format = name == "classify" ? "json" : "csv";
        s.params.validate();
        (void)mask_of(s);
        (void)s.kernel_spec().resolved(1).validate();
    } catch (const CLI::Error& e) {
        std::cerr << "lsek: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "lsek: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (name == "catalog") return run_catalog(s);
        if (name == "census") return run_census(s);
        if (name == "embed") return run_embed(s);
        if (name == "gram") return run_gram(s);
        if (name == "kpca") return run_kpca(s);
        if (name == "classify") return run_classify(s);
        if (name == "finnet") return run_finnet(s);
    } catch (const UsageError& e) {
        std::cerr << "lsek: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IngestError& e) {
        std::cerr << "lsek: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "lsek: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConvergenceError& e) {
        std::cerr << "lsek: error: " << e.what() << "; unscaled entropies make the dual badly conditioned, "
                  << "try --standardize or a smaller --C grid\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "lsek: error: " << e.what() << '\n';
        return kExitComputation;
    }
    return kExitUsage;
}
