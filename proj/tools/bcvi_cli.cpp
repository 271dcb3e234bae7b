// Command-line driver: generate | run | plot | accuracy.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "bcvi/clustering.hpp"
#include "bcvi/datasets.hpp"
#include "bcvi/pipeline.hpp"

namespace {

using namespace bcvi;

int exit_code(ErrorClass c)
{
    switch (c) {
    case ErrorClass::config: return 2;
    case ErrorClass::data: return 3;
    case ErrorClass::clustering: return 4;
    case ErrorClass::index: return 5;
    case ErrorClass::bayes: return 6;
    case ErrorClass::io: return 7;
    }
    return 1;
}

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size())
                throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError(what + ": '" + cell + "' is not a number");
        }
    }
    if (out.empty())
        throw ConfigError(what + " is empty");
    return out;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// shape:weight:c1,c2,...:s  or  shape:weight:c1,c2,...:s1,s2,...
MixtureComponent parse_component(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ':'))
        parts.push_back(part);
    if (parts.size() != 4)
        throw ConfigError("component '" + text + "' must look like shape:weight:center:spread");
    MixtureComponent c;
    if (parts[0] == "gaussian")
        c.shape = ComponentShape::gaussian;
    else if (parts[0] == "uniform")
        c.shape = ComponentShape::uniform_box;
    else
        throw ConfigError("component shape '" + parts[0] + "' must be gaussian or uniform");
    c.weight = parse_list(parts[1], "component weight").front();
    c.center = to_eigen(parse_list(parts[2], "component center"));
    auto spread = parse_list(parts[3], "component spread");
    c.spread = spread.size() == 1 ? Eigen::VectorXd::Constant(c.center.size(), spread.front()) : to_eigen(spread);
    return c;
}

struct MixtureArgs {
    std::vector<std::string> components;
    std::size_t total_n = 0;
    std::uint64_t seed = 0;

    void attach(CLI::App* app)
    {
        app->add_option("--component", components,
                        "mixture component shape:weight:center:spread (repeatable), e.g. gaussian:0.5:0,0:1");
        app->add_option("--total-n", total_n, "number of generated points");
        app->add_option("--mixture-seed", seed, "seed of the generator");
    }

    MixtureSpec spec() const
    {
        MixtureSpec s;
        for (const auto& c : components)
            s.components.push_back(parse_component(c));
        s.total_n = total_n;
        s.seed = seed;
        return s;
    }
};

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw IoError("cannot write " + path);
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bayesian cluster validity index: cluster, score k = 2..K, and rank cluster counts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "bcvi 1.0");
    // Comma lists (centers, alpha) stay single values in config files.
    auto config_format = std::make_shared<CLI::ConfigTOML>();
    config_format->arrayDelimiter(';');

    // generate
    auto* gen = app.add_subcommand("generate", "sample a labeled mixture dataset to CSV");
    gen->set_config("--config", "", "flat key = value file with option defaults");
    gen->allow_config_extras(CLI::config_extras_mode::error);
    gen->config_formatter(config_format);
    MixtureArgs gen_mix;
    gen_mix.attach(gen);
    std::string gen_out;
    gen->add_option("-o,--output", gen_out, "CSV path (stdout if omitted)");

    // run
    auto* run = app.add_subcommand("run", "full pipeline, writes a JSON report");
    run->set_config("--config", "", "flat key = value file with option defaults");
    run->allow_config_extras(CLI::config_extras_mode::error);
    run->config_formatter(config_format);
    std::string data_path, label_column, algorithm = "kmeans", index = "wi", prior_kind = "dirichlet";
    std::string profile, profile_weights, alpha, beta, run_out, plot_out;
    MixtureArgs run_mix;
    PipelineConfig cfg;
    std::optional<double> gamma, require_accuracy;
    run->add_option("--data", data_path, "input CSV");
    run->add_option("--label-column", label_column, "header name of the label column");
    run_mix.attach(run);
    run->add_option("--algorithm", algorithm, "kmeans or fcm")->check(CLI::IsMember({"kmeans", "fcm"}));
    run->add_option("--index", index, "db, str, wi (kmeans) or xb, kwon2, wp (fcm)")
        ->check(CLI::IsMember({"db", "str", "wi", "xb", "kwon2", "wp"}));
    run->add_option("--fuzziness", cfg.fuzziness, "FCM fuzziness m")->capture_default_str();
    run->add_option("--max-k", cfg.max_k, "largest reported cluster count K")->capture_default_str();
    run->add_option("--q", cfg.q, "DB scatter order")->capture_default_str();
    run->add_option("--t", cfg.t, "DB separation order")->capture_default_str();
    run->add_option("--gamma", gamma, "WP representative exponent (default: fuzziness)");
    run->add_option("--prior", prior_kind, "dirichlet or gd")->check(CLI::IsMember({"dirichlet", "gd"}));
    run->add_option("--profile", profile, "Dirichlet profile: small, moderate or large");
    run->add_option("--profile-weights", profile_weights, "in-range,out-range base weights, times sqrt(n) (default 20,1)");
    run->add_option("--alpha", alpha, "comma-separated alpha (k=2..K, or k=2..K-1 for gd); one value broadcasts");
    run->add_option("--beta", beta, "comma-separated GD beta (k=2..K-1); one value broadcasts");
    run->add_option("--restarts", cfg.run.restarts, "clustering restarts per k")->capture_default_str();
    run->add_option("--seed", cfg.run.seed, "base seed for restarts")->envname("BCVI_SEED")->capture_default_str();
    run->add_option("--max-iterations", cfg.run.max_iterations, "iteration cap per run")->capture_default_str();
    run->add_option("--tolerance", cfg.run.tolerance, "centroid displacement tolerance")->capture_default_str();
    run->add_option("--top-m", cfg.top_m, "size of the reported confidence set")->capture_default_str();
    run->add_option("--require-accuracy", require_accuracy, "fail unless labeled accuracy reaches this fraction");
    run->add_option("-o,--output", run_out, "JSON report path (stdout if omitted)");
    run->add_option("--plot", plot_out, "also write k,mean,lo,hi plot CSV here");

    // plot
    auto* plot = app.add_subcommand("plot", "turn a JSON report into k,mean,lo,hi CSV");
    std::string report_in, plot_csv_out;
    plot->add_option("--report", report_in, "JSON report")->required();
    plot->add_option("-o,--output", plot_csv_out, "CSV path (stdout if omitted)");

    // accuracy
    auto* acc = app.add_subcommand("accuracy", "cluster a labeled CSV at k and score it");
    std::string acc_data, acc_label = "label", acc_alg = "kmeans";
    int acc_k = 0;
    double acc_m = 2.0;
    RunOptions acc_run;
    acc->add_option("--data", acc_data, "labeled CSV")->required();
    acc->add_option("--label-column", acc_label, "header name of the label column")->capture_default_str();
    acc->add_option("--k", acc_k, "number of clusters")->required();
    acc->add_option("--algorithm", acc_alg, "kmeans or fcm")->check(CLI::IsMember({"kmeans", "fcm"}));
    acc->add_option("--fuzziness", acc_m, "FCM fuzziness m")->capture_default_str();
    acc->add_option("--restarts", acc_run.restarts, "clustering restarts")->capture_default_str();
    acc->add_option("--seed", acc_run.seed, "base seed")->envname("BCVI_SEED")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorClass::config);
    }

    // CLI11 reads config files only at the root; replay the subcommand's own
    // file here. Options already given on the command line keep their value.
    for (auto* sub : {gen, run}) {
        if (!sub->parsed() || sub->get_config_ptr()->count() == 0)
            continue;
        try {
            std::istringstream none;
            sub->parse_from_stream(none);
        } catch (const CLI::FileError& e) {
            std::cerr << "bcvi: io error: " << e.what() << '\n';
            return exit_code(ErrorClass::io);
        } catch (const CLI::ParseError& e) {
            std::cerr << "bcvi: config error: " << e.what() << '\n';
            return exit_code(ErrorClass::config);
        }
    }

    try {
        if (gen->parsed()) {
            const auto data = generate_mixture(gen_mix.spec());
            write_text(gen_out, to_csv(data));
        } else if (run->parsed()) {
            if (!data_path.empty())
                cfg.data_path = data_path;
            if (!label_column.empty())
                cfg.label_column = label_column;
            if (!run_mix.components.empty())
                cfg.mixture = run_mix.spec();
            cfg.algorithm = parse_algorithm(algorithm);
            cfg.index = parse_index(index);
            cfg.gamma = gamma;
            cfg.require_accuracy = require_accuracy;
            cfg.prior.kind = prior_kind == "gd" ? PriorKind::generalized_dirichlet : PriorKind::dirichlet;
            if (!profile.empty())
                cfg.prior.profile = parse_profile(profile);
            if (!profile_weights.empty()) {
                const auto w = parse_list(profile_weights, "profile-weights");
                if (w.size() != 2)
                    throw ConfigError("profile-weights needs exactly two values");
                cfg.prior.in_weight = w[0];
                cfg.prior.out_weight = w[1];
            }
            if (!alpha.empty())
                cfg.prior.alpha = parse_list(alpha, "alpha");
            if (!beta.empty())
                cfg.prior.beta = parse_list(beta, "beta");
            if (cfg.prior.kind == PriorKind::generalized_dirichlet && cfg.prior.beta.empty())
                throw ConfigError("gd prior requires --beta");

            const auto report = run_pipeline(cfg);
            write_text(run_out, to_json(report).dump(2) + "\n");
            if (!plot_out.empty())
                emit_plot_data(report, plot_out);
        } else if (plot->parsed()) {
            ordered_json j;
            try {
                j = ordered_json::parse(read_text(report_in));
            } catch (const ordered_json::parse_error& e) {
                throw DataError(std::string("report is not valid JSON: ") + e.what());
            }
            const auto records = records_from_json(j);
            write_text(plot_csv_out, plot_csv(plot_rows(records)));
        } else if (acc->parsed()) {
            const auto data = load_csv(acc_data, acc_label);
            Eigen::VectorXi assignments;
            if (acc_alg == "kmeans") {
                assignments = kmeans(data.points(), acc_k, acc_run).assignments;
            } else {
                const auto s = fcm(data.points(), acc_k, acc_m, acc_run);
                assignments.resize(s.membership.rows());
                for (Eigen::Index i = 0; i < assignments.size(); ++i)
                    s.membership.row(i).maxCoeff(&assignments(i));
            }
            const double a = clustering_accuracy(
                *data.labels(), std::span<const int>(assignments.data(), static_cast<std::size_t>(assignments.size())));
            std::cout.precision(17);
            std::cout << a << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "bcvi: " << to_string(e.error_class()) << " error: " << e.what() << '\n';
        return exit_code(e.error_class());
    } catch (const std::exception& e) {
        std::cerr << "bcvi: unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
