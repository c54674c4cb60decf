#include "dnls/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dnls {

using nlohmann::json;

namespace {

InitialProfileSpec builtin_spec(const ProfileConfig& p) {
    InitialProfileSpec s;
    s.kind = p.kind == "pure_kink" ? InitialProfileSpec::Kind::pure_kink : InitialProfileSpec::Kind::perturbed_kink;
    s.amplitude = p.amplitude;
    s.center = p.center;
    s.width = p.width;
    return s;
}

PdeOptions pde_options(const RunConfig& c) {
    PdeOptions o;
    o.sponge_width = c.sponge_width;
    o.sponge_rate = c.sponge_rate;
    return o;
}

json complex_array(const std::vector<cplx>& v) {
    json a = json::array();
    for (cplx z : v) a.push_back({z.real(), z.imag()});
    return a;
}

std::vector<cplx> read_complex_array(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw input_error("scattering file: missing array '" + key + "'");
    std::vector<cplx> out;
    for (const json& e : j.at(key)) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw input_error("scattering file: '" + key + "' entries must be [re, im]");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) out.push_back(cell);
    return out;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw input_error(path + ": malformed value '" + cell + "' on line " + std::to_string(line));
    }
}

// rows of numbers under an exact header
std::vector<std::vector<double>> read_table(const std::string& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw input_error("file not found: " + path);
    std::string line;
    if (!std::getline(in, line)) throw input_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw input_error(path + ": expected header '" + header + "'");
    const std::size_t cols = split_csv(header).size();
    std::vector<std::vector<double>> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != cols)
            throw input_error(path + ": line " + std::to_string(n) + " has " + std::to_string(cells.size()) +
                              " columns, expected " + std::to_string(cols));
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_cell(c, path, n));
        rows.push_back(std::move(row));
    }
    return rows;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

std::optional<double> fit_window(const std::vector<double>& t, const std::vector<double>& e, std::size_t start) {
    std::vector<std::pair<double, double>> s;
    for (std::size_t i = start; i < t.size(); ++i) {
        if (!(e[i] > 0.0) || !std::isfinite(e[i])) return std::nullopt;
        s.push_back({t[i], e[i]});
    }
    if (s.size() < 2) return std::nullopt;
    const double p = fit_power_law(s).exponent;
    if (!std::isfinite(p)) return std::nullopt;
    return p;
}

std::size_t window_start(std::size_t n, double fraction) {
    const std::size_t k = std::min(n, std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(fraction * n - 1e-12))));
    return n - k;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

PotentialField scattering_potential(const RunConfig& c) {
    if (c.profile.kind == "file") return load_profile_csv(c.profile.path);
    return sample_potential(builtin_spec(c.profile), c.scatter_L, c.scatter_dx);
}

EvolutionState evolution_initial(const RunConfig& c) {
    if (c.profile.kind != "file") return make_initial(builtin_spec(c.profile), c.L, c.dx, pde_options(c));
    // file data continued by its background values
    const PotentialField f = load_profile_csv(c.profile.path);
    const double a = f.grid().x0(), b = f.grid().x_last();
    const long m = std::lround(c.L / c.dx);
    std::vector<cplx> v(static_cast<std::size_t>(2 * m + 1));
    for (long i = 0; i <= 2 * m; ++i) {
        const double x = -c.L + static_cast<double>(i) * c.dx;
        v[static_cast<std::size_t>(i)] = x <= a ? cplx(-1.0) : (x >= b ? cplx(1.0) : f(x));
    }
    return make_state(ComplexGrid1D(-c.L, c.dx, std::move(v)), pde_options(c));
}

ScatteringResult run_scatter(const RunConfig& c) {
    const PotentialField q = scattering_potential(c);
    ScatteringOptions opt;
    opt.exclusion_radius = c.z_grid.exclusion_radius;
    opt.threads = c.threads;
    ScatteringResult out;
    out.table = reflection_table(q, make_z_grid(c.z_grid), opt);
    out.spectrum = find_discrete_spectrum(q, c.spectrum_samples, opt);
    out.max_unitarity_violation = max_unitarity_violation(out.table);
    for (const auto& s : out.table.samples) out.max_abs_r = std::max(out.max_abs_r, std::abs(s.r));
    return out;
}

void write_scattering_json(std::ostream& out, const ScatteringResult& s) {
    std::vector<cplx> s11, s21, r;
    for (const auto& x : s.table.samples) {
        s11.push_back(x.s11);
        s21.push_back(x.s21);
        r.push_back(x.r);
    }
    json j;
    j["grid"] = s.table.z_grid;
    j["s11"] = complex_array(s11);
    j["s21"] = complex_array(s21);
    j["r"] = complex_array(r);
    j["eigenvalues"] = complex_array(s.spectrum.eigenvalues);
    j["norming_constants"] = complex_array(s.spectrum.norming_constants);
    j["exclusion_radius"] = s.table.exclusion_radius;
    j["max_unitarity_violation"] = s.max_unitarity_violation;
    out << j.dump() << "\n";
}

ScatteringResult read_scattering_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("scattering file not found: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw input_error("scattering file " + path + ": " + e.what());
    }
    if (!j.contains("grid") || !j.at("grid").is_array()) throw input_error("scattering file: missing array 'grid'");
    ScatteringResult s;
    for (const json& z : j.at("grid")) {
        if (!z.is_number()) throw input_error("scattering file: 'grid' entries must be numbers");
        s.table.z_grid.push_back(z.get<double>());
    }
    const auto s11 = read_complex_array(j, "s11"), s21 = read_complex_array(j, "s21"), r = read_complex_array(j, "r");
    const std::size_t n = s.table.z_grid.size();
    if (s11.size() != n || s21.size() != n || r.size() != n)
        throw input_error("scattering file: grid, s11, s21 and r lengths differ");
    for (std::size_t i = 0; i < n; ++i) s.table.samples.push_back({s.table.z_grid[i], s11[i], s21[i], r[i]});
    if (j.contains("exclusion_radius")) s.table.exclusion_radius = j.at("exclusion_radius").get<double>();
    s.spectrum.eigenvalues = read_complex_array(j, "eigenvalues");
    s.spectrum.norming_constants = read_complex_array(j, "norming_constants");
    s.max_unitarity_violation = max_unitarity_violation(s.table);
    for (const auto& x : s.table.samples) s.max_abs_r = std::max(s.max_abs_r, std::abs(x.r));
    return s;
}

AsymptoticRun run_asym(const RunConfig& c, const ReflectionTable& table) {
    const AsymptoticModel model(table);
    AsymptoticRun run;
    for (double xi : c.xi_values) {
        const RayData ray = prepare_ray(model, xi);
        AsymptoticRaySummary s;
        s.xi = xi;
        s.T_infinity = ray.T_infinity;
        s.alpha_infinity = ray.alpha_infinity;
        s.identity_error = std::abs(std::exp(-I * ray.alpha_infinity) - std::pow(ray.T_infinity, -2));
        if (s.identity_error > 1e-10) {
            std::ostringstream msg;
            msg << "consistency identity exp(-i alpha) = T(inf)^-2 violated at xi = " << xi << " (error "
                << s.identity_error << ")";
            throw numerical_error(msg.str());
        }
        std::vector<cplx> ratios;
        std::vector<double> ts, dev;
        for (double t : c.t_values) {
            const auto k = constants_at(ray, t);
            const auto corr = correction_at(ray, k, t);
            const auto h = h_closed_form(ray, k, t);
            AsymptoticRow row{t, 2.0 * xi * t, xi, q_asymptotic(k, corr), corr.e1_21, q_leading(k), h.h};
            run.rows.push_back(row);
            if (corr.terms[0] != 0.0) ratios.push_back(h.term1 / corr.terms[0]);
            ts.push_back(t);
            dev.push_back(std::abs(std::abs(row.q_asy) - 1.0));
        }
        if (!ratios.empty()) {
            cplx mean = 0.0;
            for (cplx r : ratios) mean += r;
            mean /= static_cast<double>(ratios.size());
            s.h_ratio_mean = mean;
            for (cplx r : ratios) s.h_ratio_spread = std::max(s.h_ratio_spread, std::abs(r - mean));
        }
        s.q_decay_exponent = fit_window(ts, dev, window_start(ts.size(), c.fit_upper_fraction));
        run.summary.push_back(s);
    }
    return run;
}

void write_asym_summary_json(std::ostream& out, const std::vector<AsymptoticRaySummary>& s) {
    json a = json::array();
    for (const auto& r : s) {
        json e;
        e["xi"] = r.xi;
        e["T_infinity"] = {r.T_infinity.real(), r.T_infinity.imag()};
        e["alpha_infinity"] = r.alpha_infinity;
        e["identity_error"] = r.identity_error;
        e["h_ratio_mean"] = r.h_ratio_mean ? json{r.h_ratio_mean->real(), r.h_ratio_mean->imag()} : json(nullptr);
        e["h_ratio_spread"] = r.h_ratio_spread;
        e["q_decay_exponent"] = optional_number(r.q_decay_exponent);
        a.push_back(e);
    }
    out << a.dump(2) << "\n";
}

std::vector<AsymptoticRow> read_asymptotic_csv(const std::string& path) {
    const auto rows =
        read_table(path, "t,x,xi,re_q_asy,im_q_asy,abs_q_asy,re_corr,im_corr,re_q_lead,im_q_lead,re_h,im_h");
    std::vector<AsymptoticRow> out;
    for (const auto& r : rows)
        out.push_back({r[0], r[1], r[2], {r[3], r[4]}, {r[6], r[7]}, {r[8], r[9]}, {r[10], r[11]}});
    return out;
}

EvolveRun run_evolve(const RunConfig& c, const ProgressCallback& progress) {
    EvolutionState s = evolution_initial(c);
    std::vector<double> times = c.t_values;
    times.insert(times.end(), c.snapshot_times.begin(), c.snapshot_times.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(), same), times.end());
    if (!times.empty() && times.front() == 0.0) times.erase(times.begin());

    const double dt = c.dt_factor * c.dx * c.dx;
    std::vector<Snapshot> history;
    EvolveRun run;
    if (!c.snapshot_times.empty() && c.snapshot_times.front() == 0.0) run.snapshots.push_back({0.0, s.grid});
    for (double t : times) {
        s = evolve_to(std::move(s), t, dt, progress);
        history.push_back({t, s.grid});
        if (std::any_of(c.snapshot_times.begin(), c.snapshot_times.end(), [t](double u) { return same(u, t); }))
            run.snapshots.push_back({t, s.grid});
    }
    for (double xi : c.xi_values) run.rays.push_back({xi, c.t_values, sample_along_ray(history, xi, c.t_values, c.sponge_width)});
    return run;
}

std::string ray_file_name(double xi) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "ray_xi_%g.csv", xi);
    return buf;
}

std::string snapshot_file_name(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_t_%g.csv", t);
    return buf;
}

RayTrace read_ray_csv(const std::string& path) {
    const auto rows = read_table(path, "t,x,re_q,im_q");
    if (rows.empty()) throw input_error(path + ": no rows");
    RayTrace r;
    r.xi = rows[0][1] / (2.0 * rows[0][0]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double xi = rows[i][1] / (2.0 * rows[i][0]);
        if (!same(xi, r.xi))
            throw input_error(path + ": line " + std::to_string(i + 2) + " is not on the ray x = 2 xi t of the first row");
        r.t.push_back(rows[i][0]);
        r.q.emplace_back(rows[i][2], rows[i][3]);
    }
    return r;
}

ComparisonReport compare_rays(const std::vector<AsymptoticRow>& asym, const std::vector<RayTrace>& rays,
                              double fit_upper_fraction) {
    std::vector<std::string> missing_asym, missing_ray;
    auto key = [](double xi, double t) {
        std::ostringstream s;
        s << "(xi " << xi << ", t " << t << ")";
        return s.str();
    };
    for (const auto& ray : rays)
        for (double t : ray.t)
            if (std::none_of(asym.begin(), asym.end(),
                             [&](const AsymptoticRow& a) { return same(a.xi, ray.xi) && same(a.t, t); }))
                missing_asym.push_back(key(ray.xi, t));
    for (const auto& a : asym) {
        const bool found = std::any_of(rays.begin(), rays.end(), [&](const RayTrace& r) {
            return same(r.xi, a.xi) && std::any_of(r.t.begin(), r.t.end(), [&](double t) { return same(t, a.t); });
        });
        if (!found) missing_ray.push_back(key(a.xi, a.t));
    }
    if (!missing_asym.empty() || !missing_ray.empty()) {
        std::ostringstream msg;
        msg << "compare: key mismatch;";
        if (!missing_asym.empty()) {
            msg << " missing in asymptotic CSV:";
            for (const auto& k : missing_asym) msg << " " << k;
            msg << ";";
        }
        if (!missing_ray.empty()) {
            msg << " missing in ray CSV:";
            for (const auto& k : missing_ray) msg << " " << k;
        }
        throw input_error(msg.str());
    }

    ComparisonReport report;
    report.all_pass = !rays.empty();
    for (const auto& ray : rays) {
        RayComparison rc;
        rc.xi = ray.xi;
        std::vector<std::size_t> order(ray.t.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ray.t[a] < ray.t[b]; });
        std::vector<double> ts, el, ec;
        for (std::size_t i : order) {
            const double t = ray.t[i];
            const auto& a = *std::find_if(asym.begin(), asym.end(),
                                          [&](const AsymptoticRow& r) { return same(r.xi, ray.xi) && same(r.t, t); });
            ComparisonRow row{t, ray.q[i], a.q_lead, a.q_asy, std::abs(ray.q[i] - a.q_lead), std::abs(ray.q[i] - a.q_asy)};
            rc.rows.push_back(row);
            ts.push_back(t);
            el.push_back(row.err_leading);
            ec.push_back(row.err_corrected);
        }
        rc.window_start = window_start(ts.size(), fit_upper_fraction);
        rc.p_leading = fit_window(ts, el, rc.window_start);
        rc.p_corrected = fit_window(ts, ec, rc.window_start);
        rc.exact_match = std::all_of(ec.begin(), ec.end(), [](double e) { return e == 0.0; });
        rc.corrected_below_leading = true;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            rc.max_err_leading = std::max(rc.max_err_leading, el[i]);
            rc.max_err_corrected = std::max(rc.max_err_corrected, ec[i]);
            if (i >= rc.window_start) {
                rc.window_max_err_leading = std::max(rc.window_max_err_leading, el[i]);
                rc.window_max_err_corrected = std::max(rc.window_max_err_corrected, ec[i]);
            }
            rc.corrected_below_leading = rc.corrected_below_leading && ec[i] < el[i];
        }
        const bool lead_ok = rc.p_leading && *rc.p_leading >= p_leading_min && *rc.p_leading <= p_leading_max;
        const bool corr_ok = rc.exact_match || (rc.p_corrected && *rc.p_corrected >= p_corrected_min);
        rc.pass = lead_ok && corr_ok && rc.corrected_below_leading;
        report.all_pass = report.all_pass && rc.pass;
        report.rays.push_back(std::move(rc));
    }
    return report;
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& r) {
    out << "xi,t,re_q_pde,im_q_pde,re_q_lead,im_q_lead,re_q_asy,im_q_asy,err_leading,err_corrected\n";
    for (const auto& ray : r.rays)
        for (const auto& row : ray.rows)
            out << g17(ray.xi) << ',' << g17(row.t) << ',' << g17(row.q_pde.real()) << ',' << g17(row.q_pde.imag()) << ','
                << g17(row.q_lead.real()) << ',' << g17(row.q_lead.imag()) << ',' << g17(row.q_asy.real()) << ','
                << g17(row.q_asy.imag()) << ',' << g17(row.err_leading) << ',' << g17(row.err_corrected) << '\n';
}

void write_comparison_json(std::ostream& out, const ComparisonReport& r) {
    json a = json::array();
    for (const auto& ray : r.rays) {
        json e;
        e["xi"] = ray.xi;
        e["p_leading"] = optional_number(ray.p_leading);
        e["p_corrected"] = optional_number(ray.p_corrected);
        e["max_err_corrected"] = ray.max_err_corrected;
        e["max_err_leading"] = ray.max_err_leading;
        e["window_max_err_corrected"] = ray.window_max_err_corrected;
        e["window_max_err_leading"] = ray.window_max_err_leading;
        e["fit_t_min"] = ray.rows.empty() ? json(nullptr) : json(ray.rows[ray.window_start].t);
        e["corrected_below_leading"] = ray.corrected_below_leading;
        e["exact_match"] = ray.exact_match;
        if (ray.exact_match) e["note"] = "exact match: corrected fit rejected as degenerate";
        e["pass"] = ray.pass;
        a.push_back(e);
    }
    out << a.dump(2) << "\n";
}

}  // namespace dnls
