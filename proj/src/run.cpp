#include "growthdyn/run.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "growthdyn/aep.hpp"
#include "growthdyn/convergence.hpp"
#include "growthdyn/csv.hpp"
#include "growthdyn/errors.hpp"
#include "growthdyn/rng.hpp"
#include "growthdyn/scaling.hpp"
#include "growthdyn/windows.hpp"

namespace growthdyn {

namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "0.1.0";

class LockFile {
public:
    explicit LockFile(const std::string& path) : path_(path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw InvalidConfig("output directory is locked by another run (" + path +
                                " exists)");
    }
    ~LockFile() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    LockFile(const LockFile&) = delete;
    LockFile& operator=(const LockFile&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
            c = '_';
    return out;
}

std::string fmt3(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

double percentile_p_value(const std::vector<std::array<double, 3>>& replicates, int k) {
    double le = 0.0, ge = 0.0;
    for (const auto& rep : replicates) {
        if (rep[k] <= 0.0) le += 1.0;
        if (rep[k] >= 0.0) ge += 1.0;
    }
    const double b = static_cast<double>(replicates.size());
    const double p = 2.0 * std::min((le + 1.0) / (b + 1.0), (ge + 1.0) / (b + 1.0));
    return std::min(p, 1.0);
}

std::string significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

struct PeriodResults {
    PeriodDefinition period;
    std::optional<aep::AepFit> aep_emissions;
    std::optional<aep::AepFit> aep_gdp;
    std::optional<ConvergenceFit> convergence;
    std::array<double, 3> p_values{1.0, 1.0, 1.0};
    std::optional<ScalingFit> scaling_emissions;
    std::optional<ScalingFit> scaling_gdp;
};

std::string aep_fit_csv(const aep::AepFit& fit) {
    std::ostringstream out;
    out << "parameter,estimate,std_error\n";
    const std::array<double, 5> est = {fit.params.left_scale, fit.params.right_scale,
                                       fit.params.left_shape, fit.params.right_shape,
                                       fit.params.mode};
    for (std::size_t k = 0; k < 5; ++k)
        out << aep::kParamNames[k] << ',' << csv::format_sig(est[k]) << ','
            << csv::format_sig(fit.std_errors[k]) << '\n';
    out << "log_likelihood," << csv::format_sig(fit.log_likelihood) << ",\n";
    out << "n," << fit.n << ",\n";
    out << "converged," << (fit.converged ? 1 : 0) << ",\n";
    out << "se_method,"
        << (fit.se_method == aep::SeMethod::observed_information ? "observed_information"
                                                                 : "bootstrap")
        << ",\n";
    return out.str();
}

std::string convergence_csv(const ConvergenceFit& fit,
                            const std::array<double, 3>& p_values) {
    std::ostringstream out;
    out << "parameter,estimate,std_error,p_value,significance\n";
    const std::array<double, 3> est = {fit.alpha, fit.phi, fit.beta};
    for (int k = 0; k < 3; ++k)
        out << kConvergenceParamNames[k] << ',' << csv::format_sig(est[k]) << ','
            << csv::format_sig(fit.std_errors[k]) << ',' << csv::format_sig(p_values[k])
            << ',' << significance_stars(p_values[k]) << '\n';
    out << "objective," << csv::format_sig(fit.objective) << ",,,\n";
    out << "n_obs," << fit.n_obs << ",,,\n";
    out << "converged," << (fit.converged ? 1 : 0) << ",,,\n";
    return out.str();
}

std::string scaling_bins_csv(const ScalingFit& fit) {
    std::ostringstream out;
    out << "bin_center,sigma,count\n";
    for (const BinStat& bin : fit.bins)
        out << csv::format_sig(bin.bin_center) << ',' << csv::format_sig(bin.sigma) << ','
            << bin.count << '\n';
    return out.str();
}

std::string residuals_csv(const GrowthPanel& panel, const ConvergenceFit& fit,
                          const RegressionData& data) {
    std::ostringstream out;
    out << "region_id,year,epsilon\n";
    for (std::size_t i = 0; i < data.size(); ++i)
        out << panel.regions()[data.region[i]] << ',' << data.year[i] << ','
            << csv::format_sig(fit.residuals[i]) << '\n';
    return out.str();
}

std::string windows_csv(const WindowSeries& series) {
    std::ostringstream out;
    out << "start_year,end_year,converged,alpha,alpha_se,phi,phi_se,beta,beta_se,"
           "objective,n_obs,aep_converged,a_l,a_l_se,a_r,a_r_se,b_l,b_l_se,b_r,b_r_se,"
           "m,m_se,error\n";
    for (const WindowEntry& w : series.entries) {
        out << w.start_year << ',' << w.end_year << ',';
        if (w.fit) {
            const ConvergenceFit& f = *w.fit;
            out << (f.converged ? 1 : 0) << ',' << csv::format_sig(f.alpha) << ','
                << csv::format_sig(f.std_errors[0]) << ',' << csv::format_sig(f.phi)
                << ',' << csv::format_sig(f.std_errors[1]) << ','
                << csv::format_sig(f.beta) << ',' << csv::format_sig(f.std_errors[2])
                << ',' << csv::format_sig(f.objective) << ',' << f.n_obs << ',';
        } else {
            out << "0,,,,,,,,,";
        }
        if (w.residual_fit) {
            const aep::AepFit& a = *w.residual_fit;
            out << (a.converged ? 1 : 0) << ',' << csv::format_sig(a.params.left_scale)
                << ',' << csv::format_sig(a.std_errors[aep::kLeftScale]) << ','
                << csv::format_sig(a.params.right_scale) << ','
                << csv::format_sig(a.std_errors[aep::kRightScale]) << ','
                << csv::format_sig(a.params.left_shape) << ','
                << csv::format_sig(a.std_errors[aep::kLeftShape]) << ','
                << csv::format_sig(a.params.right_shape) << ','
                << csv::format_sig(a.std_errors[aep::kRightShape]) << ','
                << csv::format_sig(a.params.mode) << ','
                << csv::format_sig(a.std_errors[aep::kMode]) << ',';
        } else {
            out << ",,,,,,,,,,,";
        }
        // Errors may contain commas; quote the field.
        out << '"' << w.error << '"' << '\n';
    }
    return out.str();
}

// Table-style text report: AEP parameters per period (standard errors in
// parentheses), convergence estimates with significance stars, scaling
// slopes.
std::string tables_text(const std::vector<PeriodResults>& results) {
    std::ostringstream out;
    auto cell = [](double est, double se) { return fmt3(est) + "(" + fmt3(se) + ")"; };

    for (const bool gdp_table : {true, false}) {
        out << "AEP distribution of " << (gdp_table ? "GDP" : "CO2 emissions")
            << " growth rates\n";
        out << "parameter";
        for (const auto& pr : results) out << '\t' << pr.period.name;
        out << '\n';
        // Table order: shapes, scales, mode.
        const std::array<std::size_t, 5> order = {aep::kLeftShape, aep::kRightShape,
                                                  aep::kLeftScale, aep::kRightScale,
                                                  aep::kMode};
        for (std::size_t k : order) {
            out << aep::kParamNames[k];
            for (const auto& pr : results) {
                const auto& fit = gdp_table ? pr.aep_gdp : pr.aep_emissions;
                if (fit) {
                    const std::array<double, 5> est = {
                        fit->params.left_scale, fit->params.right_scale,
                        fit->params.left_shape, fit->params.right_shape, fit->params.mode};
                    out << '\t' << cell(est[k], fit->std_errors[k]);
                } else {
                    out << "\t-";
                }
            }
            out << '\n';
        }
        out << '\n';
    }

    out << "Dynamic convergence model (least absolute deviations)\n";
    out << "parameter";
    for (const auto& pr : results) out << '\t' << pr.period.name;
    out << '\n';
    for (int k = 0; k < 3; ++k) {
        out << kConvergenceParamNames[k];
        for (const auto& pr : results) {
            if (pr.convergence) {
                const std::array<double, 3> est = {pr.convergence->alpha,
                                                   pr.convergence->phi,
                                                   pr.convergence->beta};
                out << '\t' << fmt3(est[k]) << significance_stars(pr.p_values[k]) << "("
                    << fmt3(pr.convergence->std_errors[k]) << ")";
            } else {
                out << "\t-";
            }
        }
        out << '\n';
    }
    out << "significance: * p<0.1, ** p<0.05, *** p<0.01 (bootstrap percentile)\n\n";

    out << "Volatility-size scaling (slope of ln sigma on relative GDP size)\n";
    out << "variable";
    for (const auto& pr : results) out << '\t' << pr.period.name;
    out << '\n';
    for (const bool gdp_row : {true, false}) {
        out << (gdp_row ? "gdp" : "emissions");
        for (const auto& pr : results) {
            const auto& fit = gdp_row ? pr.scaling_gdp : pr.scaling_emissions;
            if (fit)
                out << '\t' << cell(fit->beta, fit->beta_se);
            else
                out << "\t-";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::vector<PeriodDefinition> parse_periods_spec(const std::string& spec) {
    std::vector<PeriodDefinition> periods;
    std::istringstream stream(spec);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        const std::size_t colon = token.find(':');
        const std::size_t dash = token.find('-', colon == std::string::npos ? 0 : colon);
        if (colon == std::string::npos || dash == std::string::npos)
            throw InvalidConfig("bad period spec '" + token +
                                "', expected name:start-end");
        PeriodDefinition p;
        p.name = token.substr(0, colon);
        try {
            p.start_year = std::stoi(token.substr(colon + 1, dash - colon - 1));
            p.end_year = std::stoi(token.substr(dash + 1));
        } catch (const std::exception&) {
            throw InvalidConfig("bad period years in '" + token + "'");
        }
        periods.push_back(std::move(p));
    }
    if (periods.empty()) throw InvalidConfig("empty periods spec");
    return periods;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);

    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto trim = [](std::string s) {
            const auto from = s.find_first_not_of(" \t\r");
            if (from == std::string::npos) return std::string();
            const auto to = s.find_last_not_of(" \t\r");
            return s.substr(from, to - from + 1);
        };
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig(path + ":" + std::to_string(line_no) +
                                ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "input_emissions") {
                config.emissions_path = value;
            } else if (key == "input_gdp") {
                config.gdp_path = value;
            } else if (key == "year_range") {
                const std::size_t dash = value.find('-');
                if (dash == std::string::npos) throw std::invalid_argument(value);
                config.year_range = {std::stoi(value.substr(0, dash)),
                                     std::stoi(value.substr(dash + 1))};
            } else if (key == "periods") {
                config.periods = parse_periods_spec(value);
            } else if (key == "window_length") {
                config.window_length = std::stoi(value);
            } else if (key == "bins") {
                config.n_bins = static_cast<std::size_t>(std::stoul(value));
            } else if (key == "bootstrap") {
                config.bootstrap_replicates = std::stoi(value);
            } else if (key == "window_bootstrap") {
                config.window_bootstrap_replicates = std::stoi(value);
            } else if (key == "aep_bootstrap") {
                config.aep_bootstrap_replicates = std::stoi(value);
            } else if (key == "seed") {
                config.seed = std::stoull(value);
            } else if (key == "out") {
                config.out_dir = value;
            } else if (key == "average_periods") {
                const std::size_t comma = value.find(',');
                if (comma == std::string::npos) throw std::invalid_argument(value);
                config.average_period_a = value.substr(0, comma);
                config.average_period_b = value.substr(comma + 1);
            } else {
                throw InvalidConfig(path + ":" + std::to_string(line_no) +
                                    ": unknown key '" + key + "'");
            }
        } catch (const InvalidConfig&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidConfig(path + ":" + std::to_string(line_no) +
                                ": bad value for '" + key + "'");
        }
    }
    return config;
}

RunReport run(const RunConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();

    if (config.emissions_path.empty() || config.gdp_path.empty())
        throw InvalidConfig("run: input_emissions and input_gdp are required");
    if (!fs::exists(config.emissions_path))
        throw InvalidConfig("run: missing input file " + config.emissions_path);
    if (!fs::exists(config.gdp_path))
        throw InvalidConfig("run: missing input file " + config.gdp_path);
    if (!config.seed)
        throw InvalidConfig("run: a seed is required for the stochastic steps");
    if (config.out_dir.empty()) throw InvalidConfig("run: output directory is required");
    if (config.window_length < 2) throw InvalidConfig("run: window_length must be >= 2");
    if (config.n_bins < 3) throw InvalidConfig("run: bins must be >= 3");
    if (config.bootstrap_replicates < 100 || config.window_bootstrap_replicates < 100 ||
        config.aep_bootstrap_replicates < 100)
        throw InvalidConfig("run: bootstrap replicate counts must be >= 100");

    fs::create_directories(config.out_dir);
    LockFile lock((fs::path(config.out_dir) / ".growthdyn.lock").string());

    const std::uint64_t seed = *config.seed;
    RunReport report;
    const auto out_path = [&](const std::string& name) {
        return (fs::path(config.out_dir) / name).string();
    };
    const auto emit = [&](const std::string& name, const std::string& content) {
        csv::write_file_atomic(out_path(name), content);
        report.outputs.push_back(name);
    };

    const std::vector<RegionYearObservation> observations =
        csv::ingest(config.emissions_path, config.gdp_path);
    const GrowthPanel panel = GrowthPanel::build(observations, config.year_range);

    // Resolve the period set: an explicit list must lie inside the data
    // range; the canonical default is clipped to it.
    std::vector<PeriodDefinition> periods;
    if (config.periods.empty()) {
        for (PeriodDefinition p : canonical_periods()) {
            p.start_year = std::max(p.start_year, panel.first_year());
            p.end_year = std::min(p.end_year, panel.last_year());
            if (p.start_year <= p.end_year) periods.push_back(std::move(p));
        }
    } else {
        for (const PeriodDefinition& p : config.periods) {
            if (p.start_year < panel.first_year() || p.end_year > panel.last_year())
                throw InvalidConfig("run: period '" + p.name + "' outside data range " +
                                    std::to_string(panel.first_year()) + "-" +
                                    std::to_string(panel.last_year()));
            periods.push_back(p);
        }
    }

    std::vector<PeriodResults> results;
    std::ostringstream scaling_fits_csv;
    scaling_fits_csv << "variable,period,beta,intercept,beta_se,r_squared,n_bins\n";

    for (std::size_t pi = 0; pi < periods.size(); ++pi) {
        PeriodResults pr;
        pr.period = periods[pi];
        const std::string tag = sanitize(pr.period.name);
        const PanelSlice slice = restrict(panel, pr.period);

        // Pooled growth-rate samples for the distribution fits.
        std::vector<double> r_pool, g_pool;
        r_pool.reserve(slice.n_obs());
        g_pool.reserve(slice.n_obs());
        for (std::size_t i = 0; i < panel.n_regions(); ++i)
            for (int t = slice.growth_start_year(); t <= slice.end_year(); ++t) {
                r_pool.push_back(panel.r(i, t));
                g_pool.push_back(panel.g(i, t));
            }

        for (const bool gdp_fit : {false, true}) {
            aep::FitOptions options;
            options.bootstrap_replicates = config.aep_bootstrap_replicates;
            options.bootstrap_seed = derive_seed(seed, pi * 8 + (gdp_fit ? 1 : 0));
            const char* var = gdp_fit ? "gdp" : "emissions";
            try {
                aep::AepFit fit = aep::fit_mle(gdp_fit ? g_pool : r_pool, options);
                if (!fit.converged) {
                    report.all_converged = false;
                    report.failures.push_back("aep " + std::string(var) + " " +
                                              pr.period.name + ": fit not converged");
                }
                emit("aep_" + std::string(var) + "_" + tag + ".csv", aep_fit_csv(fit));
                (gdp_fit ? pr.aep_gdp : pr.aep_emissions) = std::move(fit);
            } catch (const Error& e) {
                report.all_converged = false;
                report.failures.push_back("aep " + std::string(var) + " " +
                                          pr.period.name + ": " + e.what());
            }
        }

        try {
            ConvergenceFit fit = fit_lad(slice);
            const BootstrapResult boot = bootstrap(slice, fit, config.bootstrap_replicates,
                                                   derive_seed(seed, pi * 8 + 2));
            fit.std_errors = boot.std_errors;
            for (int k = 0; k < 3; ++k)
                pr.p_values[k] = percentile_p_value(boot.replicates, k);
            if (!fit.converged) {
                report.all_converged = false;
                report.failures.push_back("convergence " + pr.period.name +
                                          ": fit not converged");
            }
            emit("convergence_" + tag + ".csv", convergence_csv(fit, pr.p_values));
            emit("residuals_" + tag + ".csv",
                 residuals_csv(panel, fit, build_regression_data(slice)));
            pr.convergence = std::move(fit);
        } catch (const Error& e) {
            report.all_converged = false;
            report.failures.push_back("convergence " + pr.period.name + ": " + e.what());
        }

        for (const bool gdp_var : {false, true}) {
            const char* var = gdp_var ? "gdp" : "emissions";
            try {
                BinOptions bin_options;
                bin_options.n_bins = config.n_bins;
                const ScalingFit fit = fit_scaling(binned_volatility(
                    slice, gdp_var ? GrowthVariable::gdp : GrowthVariable::emissions,
                    bin_options));
                emit("scaling_" + std::string(var) + "_" + tag + ".csv",
                     scaling_bins_csv(fit));
                scaling_fits_csv << var << ',' << pr.period.name << ','
                                 << csv::format_sig(fit.beta) << ','
                                 << csv::format_sig(fit.intercept) << ','
                                 << csv::format_sig(fit.beta_se) << ','
                                 << csv::format_sig(fit.r_squared) << ','
                                 << fit.bins.size() << '\n';
                (gdp_var ? pr.scaling_gdp : pr.scaling_emissions) = fit;
            } catch (const Error& e) {
                report.all_converged = false;
                report.failures.push_back("scaling " + std::string(var) + " " +
                                          pr.period.name + ": " + e.what());
            }
        }

        results.push_back(std::move(pr));
    }
    emit("scaling_fits.csv", scaling_fits_csv.str());

    // Moving windows.
    WindowOptions window_options;
    window_options.bootstrap_replicates = config.window_bootstrap_replicates;
    window_options.seed = derive_seed(seed, 0xA110C);
    window_options.aep.bootstrap_replicates = config.aep_bootstrap_replicates;
    window_options.aep.bootstrap_seed = derive_seed(seed, 0xA110D);
    const WindowSeries series =
        run_moving_windows(panel, config.window_length, window_options);
    for (const WindowEntry& w : series.entries) {
        if (!w.error.empty()) {
            report.all_converged = false;
            report.failures.push_back("window " + std::to_string(w.start_year) + "-" +
                                      std::to_string(w.end_year) + ": " + w.error);
        } else if ((w.fit && !w.fit->converged) ||
                   (w.residual_fit && !w.residual_fit->converged)) {
            report.all_converged = false;
            report.failures.push_back("window " + std::to_string(w.start_year) + "-" +
                                      std::to_string(w.end_year) + ": fit not converged");
        }
    }
    emit("windows.csv", windows_csv(series));

    // Per-region average growth over the two comparison periods.
    const auto find_period = [&](const std::string& name) -> const PeriodDefinition* {
        for (const auto& p : periods)
            if (p.name == name) return &p;
        return nullptr;
    };
    const PeriodDefinition* pa = find_period(config.average_period_a);
    const PeriodDefinition* pb = find_period(config.average_period_b);
    if (pa && pb) {
        const PanelSlice slice_a = restrict(panel, *pa);
        const PanelSlice slice_b = restrict(panel, *pb);
        std::ostringstream out;
        out << "region_id,dev_class,mean_g_" << sanitize(pa->name) << ",mean_r_"
            << sanitize(pa->name) << ",mean_g_" << sanitize(pb->name) << ",mean_r_"
            << sanitize(pb->name) << '\n';
        for (std::size_t i = 0; i < panel.n_regions(); ++i) {
            out << panel.regions()[i] << ',' << panel.dev_class(i);
            for (const PanelSlice* slice : {&slice_a, &slice_b}) {
                double mean_g = 0.0, mean_r = 0.0;
                const int t0 = slice->growth_start_year();
                const int t1 = slice->end_year();
                for (int t = t0; t <= t1; ++t) {
                    mean_g += panel.g(i, t);
                    mean_r += panel.r(i, t);
                }
                const double count = static_cast<double>(t1 - t0 + 1);
                out << ',' << csv::format_sig(mean_g / count) << ','
                    << csv::format_sig(mean_r / count);
            }
            out << '\n';
        }
        emit("period_averages.csv", out.str());
    }

    emit("tables.txt", tables_text(results));

    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    nlohmann::json manifest;
    manifest["tool"] = "growthdyn";
    manifest["version"] = kToolVersion;
    manifest["inputs"]["emissions"] = {{"path", config.emissions_path},
                                       {"fnv1a64", csv::file_hash(config.emissions_path)}};
    manifest["inputs"]["gdp"] = {{"path", config.gdp_path},
                                 {"fnv1a64", csv::file_hash(config.gdp_path)}};
    manifest["seed"] = seed;
    manifest["config"] = {{"window_length", config.window_length},
                          {"bins", config.n_bins},
                          {"bootstrap", config.bootstrap_replicates},
                          {"window_bootstrap", config.window_bootstrap_replicates},
                          {"aep_bootstrap", config.aep_bootstrap_replicates}};
    nlohmann::json period_list = nlohmann::json::array();
    for (const auto& p : periods)
        period_list.push_back(
            {{"name", p.name}, {"start", p.start_year}, {"end", p.end_year}});
    manifest["periods"] = period_list;
    manifest["phase_markers"] = series.phase_markers;
    manifest["panel"] = {{"regions", panel.n_regions()},
                         {"first_year", panel.first_year()},
                         {"last_year", panel.last_year()}};
    manifest["outputs"] = report.outputs;
    manifest["all_converged"] = report.all_converged;
    manifest["failures"] = report.failures;
    manifest["wall_time_seconds"] = wall_seconds;
    csv::write_file_atomic(out_path("manifest.json"), manifest.dump(2) + "\n");
    report.outputs.push_back("manifest.json");

    return report;
}

}  // namespace growthdyn
