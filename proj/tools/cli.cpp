#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "comodep/analytic.hpp"
#include "comodep/csv.hpp"
#include "comodep/empirical.hpp"
#include "comodep/errors.hpp"
#include "comodep/oracle.hpp"
#include "comodep/simulate.hpp"

namespace comodep::cli {

std::string format_value(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

using json = nlohmann::ordered_json;

// Bad command-line input that CLI11 itself cannot detect.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double rounded(double x) { return std::stod(format_value(x)); }

json to_json(const MeasureReport& r) {
    json j;
    j["measure"] = std::string(to_string(r.measure));
    j["variant"] = std::string(to_string(r.variant));
    j["value"] = rounded(r.value);
    j["n"] = r.diagnostics.n ? json(*r.diagnostics.n) : json(nullptr);
    j["seed"] = r.diagnostics.seed ? json(*r.diagnostics.seed) : json(nullptr);
    return j;
}

void print_reports(const std::vector<MeasureReport>& reports, bool as_json, std::ostream& out) {
    if (as_json) {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        out << arr.dump(2) << '\n';
        return;
    }
    out << std::left << std::setw(11) << "measure" << std::setw(19) << "variant" << "value\n";
    for (const auto& r : reports) {
        out << std::left << std::setw(11) << to_string(r.measure) << std::setw(19) << to_string(r.variant)
            << format_value(r.value) << '\n';
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const auto& f : split(s, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(f, &used));
            if (used != f.size()) throw std::invalid_argument(f);
        } catch (const std::exception&) {
            throw InvalidArgument(std::string(what) + ": not a number: '" + f + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string path;
    std::string measures = "rho";
    std::string variant = "general";
    bool json = false;
};

void cmd_estimate(const EstimateArgs& a, std::ostream& out) {
    const SampleMatrix sample = read_csv(std::filesystem::path(a.path));
    const bool nonneg = a.variant == "nonneg";
    if (!nonneg && a.variant != "general") throw InvalidArgument("--variant must be general or nonneg");

    std::optional<empirical::Classical> classical;
    std::vector<MeasureReport> reports;
    Diagnostics d;
    d.n = sample.rows();
    for (const auto& name : split(a.measures, ',')) {
        const auto m = parse_measure(name);
        if (!m) throw UsageError("unknown measure '" + name + "'");
        double value = 0.0;
        Variant variant = Variant::estimator_general;
        switch (*m) {
            case Measure::rho:
                if (nonneg) {
                    value = empirical::rho_hat_nonneg(sample);
                    variant = Variant::estimator_nonneg;
                } else {
                    value = empirical::rho_hat_general(sample);
                }
                break;
            case Measure::rho_c: value = empirical::rho_c_hat(sample); break;
            case Measure::kappa: value = empirical::kappa_hat(sample); break;
            default: {
                if (!classical) classical = empirical::classical_hat(sample);
                switch (*m) {
                    case Measure::pearson: value = classical->pearson; break;
                    case Measure::kendall: value = classical->kendall; break;
                    case Measure::spearman: value = classical->spearman; break;
                    case Measure::gini: value = classical->gini; break;
                    default: value = classical->blomqvist; break;
                }
            }
        }
        reports.push_back(MeasureReport::make(*m, variant, value, d));
    }
    print_reports(reports, a.json, out);
}

// ---------------------------------------------------------------------------
// model construction shared by analytic and simulate
// ---------------------------------------------------------------------------

struct ModelArgs {
    std::string model;
    double alpha = 0.0;
    std::string margins = "uniform";
    double a12 = 0.0, a13 = 0.0, a23 = 0.0, a123 = 0.0;
    double a0 = 0.0;
    std::string mean;
    std::string cov;
    std::size_t dim = 2;
};

std::vector<Marginal> copula_margins(const ModelArgs& a, std::size_t m) {
    Marginal marg = Marginal::uniform(0.0, 1.0);
    if (a.margins == "exp1") {
        marg = Marginal::exponential(1.0);
    } else if (a.margins != "uniform") {
        throw InvalidArgument("--margins must be uniform or exp1");
    }
    return std::vector<Marginal>(m, marg);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_params(const ModelArgs& a) {
    const auto mu = parse_list(a.mean, "--mean");
    const auto cv = parse_list(a.cov, "--cov");
    const auto m = static_cast<Eigen::Index>(mu.size());
    if (m < 2 || cv.size() != mu.size() * mu.size()) {
        throw InvalidArgument("gaussian: --mean needs m >= 2 entries and --cov m*m entries (row-major)");
    }
    Eigen::VectorXd mean(m);
    Eigen::MatrixXd cov(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        mean(i) = mu[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m; ++j) cov(i, j) = cv[static_cast<std::size_t>(i * m + j)];
    }
    return {mean, cov};
}

JointModel build_model(const ModelArgs& a) {
    if (a.model == "fgm2") return JointModel::copula_model(Copula::fgm2(a.alpha), copula_margins(a, 2));
    if (a.model == "egm3") {
        return JointModel::copula_model(Copula::egm3(a.a12, a.a13, a.a23, a.a123), copula_margins(a, 3));
    }
    if (a.model == "independent") return JointModel::copula_model(Copula::independent(a.dim), copula_margins(a, a.dim));
    if (a.model == "comonotone") return JointModel::copula_model(Copula::comonotone(a.dim), copula_margins(a, a.dim));
    if (a.model == "pareto3") return JointModel::pareto3(a.alpha, a.a0);
    if (a.model == "gaussian") {
        auto [mean, cov] = gaussian_params(a);
        return JointModel::gaussian(mean, cov);
    }
    throw InvalidArgument("unknown model '" + a.model + "'");
}

// ---------------------------------------------------------------------------
// analytic
// ---------------------------------------------------------------------------

struct AnalyticArgs {
    ModelArgs model;
    std::string measure = "rho";
    std::string variant = "corrected";
    bool check = false;
    bool json = false;
    std::uint64_t seed = 1;
};

struct Evaluation {
    double value = 0.0;
    std::optional<double> check;
};

Evaluation evaluate_fgm2(const AnalyticArgs& a, Measure m) {
    if (m != Measure::rho && m != Measure::rho_c && m != Measure::kappa) {
        throw InvalidArgument("fgm2: measure must be rho, rho_c or kappa");
    }
    // With two components all three coincide.
    const auto margins = a.model.margins == "exp1" ? analytic::FgmMargins::exp1 : analytic::FgmMargins::uniform01;
    const auto model = build_model(a.model);
    Evaluation e{analytic::fgm_rho_closed(a.model.alpha, margins), std::nullopt};
    if (a.check) e.check = analytic::rho_from_copula(model, QuadratureSpec{}).value;
    return e;
}

Evaluation evaluate_egm3(const AnalyticArgs& a, Measure m) {
    const Egm3 p{a.model.a12, a.model.a13, a.model.a23, a.model.a123};
    if (a.model.margins != "uniform") throw InvalidArgument("egm3: closed forms assume uniform margins");
    const auto model = build_model(a.model);
    Evaluation e;
    switch (m) {
        case Measure::rho:
            e.value = analytic::egm3_rho(p);
            if (a.check) e.check = analytic::rho_from_copula(model, QuadratureSpec{}).value;
            break;
        case Measure::kappa:
            e.value = analytic::egm3_kappa(p);
            if (a.check) e.check = oracle::kappa_from_copula(model, QuadratureSpec{}).value;
            break;
        case Measure::rho_c:
            e.value = analytic::egm3_rho_c(p);
            if (a.check) {
                // Each bivariate margin is FGM; all pairs share the comonotone covariance.
                double sum = 0.0;
                for (double aij : {p.a12, p.a13, p.a23}) {
                    const auto pair = JointModel::copula_model(
                        Copula::fgm2(aij), {Marginal::uniform(0.0, 1.0), Marginal::uniform(0.0, 1.0)});
                    sum += analytic::rho_from_copula(pair, QuadratureSpec{}).value;
                }
                e.check = sum / 3.0;
            }
            break;
        default: throw InvalidArgument("egm3: measure must be rho, rho_c or kappa");
    }
    return e;
}

Evaluation evaluate_pareto3(const AnalyticArgs& a, Measure m) {
    analytic::ParetoVariant variant = analytic::ParetoVariant::corrected;
    if (a.variant == "paper") {
        variant = analytic::ParetoVariant::paper;
    } else if (a.variant != "corrected") {
        throw InvalidArgument("--variant must be paper or corrected");
    }
    const double a0 = a.model.a0;
    const double al = a.model.alpha;
    Evaluation e;
    if (m == Measure::rho) {
        e.value = analytic::pareto3_rho(a0, al, variant);
        if (a.check) e.check = oracle::tail_integral_rho(JointModel::pareto3(al, a0), QuadratureSpec{}).value;
    } else if (m == Measure::rho_c) {
        e.value = analytic::pareto3_rho_c(a0, al);
        if (a.check) {
            const auto model = JointModel::pareto3(al, a0);
            const QuadratureSpec q;
            const double mean = model.marginals()[0].mean();
            const double pair = oracle::tail_product_moment(model, {0, 1}, q).value;
            const std::vector<Marginal> two(2, model.marginals()[0]);
            const double comon = analytic::comonotone_product_moment(two, q).value;
            e.check = (pair - mean * mean) / (comon - mean * mean);
        }
    } else {
        throw InvalidArgument("pareto3: measure must be rho or rho_c");
    }
    return e;
}

Evaluation evaluate_gaussian(const AnalyticArgs& a, Measure m) {
    auto [mean, cov] = gaussian_params(a.model);
    Evaluation e;
    if (m == Measure::rho) {
        e.value = analytic::gaussian_rho(mean, cov);
        if (a.check) e.check = oracle::mc_rho(JointModel::gaussian(mean, cov), 200000, a.seed).value;
    } else if (m == Measure::rho_c) {
        e.value = analytic::gaussian_rho_c(cov);
    } else {
        throw InvalidArgument("gaussian: measure must be rho or rho_c");
    }
    return e;
}

void cmd_analytic(const AnalyticArgs& a, std::ostream& out) {
    const auto m = parse_measure(a.measure);
    if (!m) throw InvalidArgument("unknown measure '" + a.measure + "'");
    Evaluation e;
    if (a.model.model == "fgm2") {
        e = evaluate_fgm2(a, *m);
    } else if (a.model.model == "egm3") {
        e = evaluate_egm3(a, *m);
    } else if (a.model.model == "pareto3") {
        e = evaluate_pareto3(a, *m);
    } else if (a.model.model == "gaussian") {
        e = evaluate_gaussian(a, *m);
    } else {
        throw InvalidArgument("--model must be fgm2, egm3, pareto3 or gaussian");
    }
    if (a.json) {
        json j = to_json(MeasureReport::make(*m, Variant::closed_form, e.value));
        if (e.check) {
            j["check"] = rounded(*e.check);
            j["gap"] = rounded(std::abs(e.value - *e.check));
        }
        out << j.dump(2) << '\n';
        return;
    }
    out << format_value(e.value) << '\n';
    if (a.check) {
        if (e.check) {
            out << "check " << format_value(*e.check) << '\n';
            out << "gap " << format_value(std::abs(e.value - *e.check)) << '\n';
        } else {
            out << "check unavailable\n";
        }
    }
}

// ---------------------------------------------------------------------------
// simulate and figure1
// ---------------------------------------------------------------------------

struct SimulateArgs {
    ModelArgs model;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::string out = "-";
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto sample = simulate::sample(build_model(a.model), a.n, a.seed);
    if (a.out == "-") {
        write_csv(out, sample);
    } else {
        write_csv(std::filesystem::path(a.out), sample);
    }
}

struct FigureArgs {
    double alpha = 4.0;
    std::string grid = "0:10:0.5";
    std::string variant = "corrected";
    std::string out = "-";
};

void cmd_figure1(const FigureArgs& a, std::ostream& out) {
    const auto parts = split(a.grid, ':');
    if (parts.size() != 3) throw UsageError("--a0-grid must be lo:hi:step");
    const double lo = parse_list(parts[0], "--a0-grid")[0];
    const double hi = parse_list(parts[1], "--a0-grid")[0];
    const double step = parse_list(parts[2], "--a0-grid")[0];
    if (!(step > 0.0) || !(hi >= lo) || lo < 0.0) throw InvalidArgument("--a0-grid needs 0 <= lo <= hi and step > 0");
    analytic::ParetoVariant variant = analytic::ParetoVariant::corrected;
    if (a.variant == "paper") {
        variant = analytic::ParetoVariant::paper;
    } else if (a.variant != "corrected") {
        throw InvalidArgument("--variant must be paper or corrected");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::ostringstream csv;
    csv << "a0,rho,rho_c\n";
    for (std::size_t i = 0; i < count; ++i) {
        const double a0 = lo + static_cast<double>(i) * step;
        csv << format_value(a0) << ',' << format_value(analytic::pareto3_rho(a0, a.alpha, variant)) << ','
            << format_value(analytic::pareto3_rho_c(a0, a.alpha)) << '\n';
    }
    if (a.out == "-") {
        out << csv.str();
    } else {
        std::ofstream f(a.out);
        if (!f) throw InvalidArgument("cannot write '" + a.out + "'");
        f << csv.str();
    }
}

void add_model_options(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--model", m.model, "fgm2, egm3, pareto3, gaussian, independent or comonotone")->required();
    cmd->add_option("--alpha", m.alpha, "FGM parameter, or Pareto alpha");
    cmd->add_option("--margins", m.margins, "uniform (U(0,1)) or exp1 (Exp(1)) for copula models");
    cmd->add_option("--a12", m.a12);
    cmd->add_option("--a13", m.a13);
    cmd->add_option("--a23", m.a23);
    cmd->add_option("--a123", m.a123);
    cmd->add_option("--a0", m.a0, "Pareto common-shock shape alpha0");
    cmd->add_option("--mean", m.mean, "Gaussian mean, comma separated");
    cmd->add_option("--cov", m.cov, "Gaussian covariance, row-major, comma separated");
    cmd->add_option("--dim", m.dim, "dimension of independent/comonotone models");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"comonotonicity-based dependence measures"};
    app.name("comodep");
    app.require_subcommand(1);

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "estimate measures from a CSV sample");
    estimate->add_option("csv", est.path, "input CSV with a header row")->required();
    estimate->add_option("--measures", est.measures,
                         "comma separated: rho, rho_c, kappa, pearson, kendall, spearman, gini, blomqvist");
    estimate->add_option("--variant", est.variant, "rho estimator: general or nonneg");
    estimate->add_flag("--json", est.json, "JSON output");

    AnalyticArgs ana;
    auto* analytic_cmd = app.add_subcommand("analytic", "closed-form values for parametric models");
    add_model_options(analytic_cmd, ana.model);
    analytic_cmd->add_option("--measure", ana.measure, "rho, rho_c or kappa");
    analytic_cmd->add_option("--variant", ana.variant, "Pareto triple moment: paper or corrected");
    analytic_cmd->add_flag("--check", ana.check, "also print the numerical reference value and the gap");
    analytic_cmd->add_option("--seed", ana.seed, "seed for Monte Carlo checks");
    analytic_cmd->add_flag("--json", ana.json, "JSON output");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "draw a sample as CSV");
    add_model_options(simulate_cmd, sim.model);
    simulate_cmd->add_option("--n", sim.n, "rows")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    simulate_cmd->add_option("--seed", sim.seed);
    simulate_cmd->add_option("--out", sim.out, "output path, - for stdout");

    FigureArgs fig;
    auto* figure = app.add_subcommand("figure1", "rho and rho_C of the trivariate Pareto II model over an alpha0 grid");
    figure->add_option("--alpha", fig.alpha);
    figure->add_option("--a0-grid", fig.grid, "lo:hi:step");
    figure->add_option("--variant", fig.variant, "paper or corrected");
    figure->add_option("--out", fig.out, "output path, - for stdout");

    std::vector<const char*> argv{"comodep"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    try {
        if (estimate->parsed()) {
            cmd_estimate(est, out);
        } else if (analytic_cmd->parsed()) {
            cmd_analytic(ana, out);
        } else if (simulate_cmd->parsed()) {
            cmd_simulate(sim, out);
        } else {
            cmd_figure1(fig, out);
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const DegenerateDenominator& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerate;
    } catch (const DimensionUnsupported& e) {
        err << "error: " << e.what() << '\n';
        return estimate->parsed() ? kDegenerate : kInvalidModel;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidModel;
    } catch (const InadmissibleCopula& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidModel;
    } catch (const MomentUndefined& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidModel;
    } catch (const ModelNotSamplable& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidModel;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace comodep::cli
