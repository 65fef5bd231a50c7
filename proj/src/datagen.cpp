#include "lpvio/datagen.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lpvio/errors.hpp"
#include "lpvio/rng.hpp"

namespace lpvio {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename failed: " + target.string() + ": " + ec.message());
}

}  // namespace

CoefficientVector mds_coefficients(const MdsParams& p, double rho) {
    if (rho < 0.0 || rho > 1.0)
        throw std::invalid_argument("mds_coefficients: rho must lie in [0, 1]");
    const double den = p.m + p.c + p.stiffness(rho);
    if (den <= 0.0) throw NumericError("mds_coefficients: m + c + k(rho) must be positive");
    CoefficientVector cv;
    cv.a.resize(2);
    cv.a << -(2.0 * p.m + p.c) / den, p.m / den;
    cv.b = Vector::Constant(1, 1.0 / den);
    return cv;
}

CoefficientMap mds_coefficient_map(const MdsParams& p) {
    return [p](const SchedulingPoint& rho) { return mds_coefficients(p, rho.scalar()); };
}

SignalSequence multisine(int n_samples, double f_low, double f_high, int n_components,
                         double t_s, const Vector& phases) {
    if (n_samples < 1) throw std::invalid_argument("multisine: n_samples must be >= 1");
    if (n_components < 1) throw std::invalid_argument("multisine: n_components must be >= 1");
    if (phases.size() != 0 && phases.size() != n_components)
        throw std::invalid_argument("multisine: phase vector length mismatch");

    Vector freqs(n_components);
    for (int i = 0; i < n_components; ++i)
        freqs[i] = n_components == 1
                       ? f_low
                       : f_low + i * (f_high - f_low) / (n_components - 1);

    SignalSequence u;
    u.t_s = t_s;
    u.samples.resize(n_samples);
    for (int k = 1; k <= n_samples; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n_components; ++i) {
            const double phase = phases.size() ? phases[i] : 0.0;
            acc += std::sin(kTwoPi * freqs[i] * k / t_s + phase);
        }
        u.samples[k - 1] = acc;
    }
    return u;
}

std::vector<SchedulingPoint> linear_scheduling(int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("linear_scheduling: n_samples must be >= 1");
    const SchedulingDomain dom = SchedulingDomain::unit();
    std::vector<SchedulingPoint> rho;
    rho.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 1; k <= n_samples; ++k)
        rho.push_back(dom.point(1.0 - static_cast<double>(k) / n_samples));
    return rho;
}

std::vector<SchedulingPoint> Dataset::scheduling_points() const {
    const SchedulingDomain dom = SchedulingDomain::unit();
    std::vector<SchedulingPoint> pts;
    pts.reserve(static_cast<std::size_t>(rho.size()));
    for (Eigen::Index i = 0; i < rho.size(); ++i) pts.push_back(dom.point(rho[i]));
    return pts;
}

namespace {

Dataset generate_impl(const MdsParams& p, int n_samples, double sigma_v, std::uint64_t seed,
                      const Vector& phases, Rng& rng) {
    Dataset ds;
    ds.t_s = p.t_s;
    ds.sigma_v = sigma_v;
    ds.seed = seed;
    ds.u = multisine(n_samples, 0.01, 0.1, 10, p.t_s, phases);
    const auto sched = linear_scheduling(n_samples);
    ds.rho.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) ds.rho[i] = sched[static_cast<std::size_t>(i)].scalar();
    ds.y_clean = simulate_io(LpvIoStructure(2, 1), mds_coefficient_map(p), ds.u, sched).samples;
    ds.v.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) ds.v[i] = sigma_v * rng.gaussian();
    ds.y = ds.y_clean + ds.v;
    return ds;
}

}  // namespace

Dataset generate_dataset(const MdsParams& p, int n_samples, double sigma_v, std::uint64_t seed,
                         const Vector& phases) {
    Rng rng(seed);
    return generate_impl(p, n_samples, sigma_v, seed, phases, rng);
}

Dataset generate_validation_dataset(const MdsParams& p, int n_samples, double sigma_v,
                                    std::uint64_t seed) {
    Rng rng(seed);
    Vector phases(10);
    for (int i = 0; i < 10; ++i) phases[i] = rng.uniform(0.0, kTwoPi);
    return generate_impl(p, n_samples, sigma_v, seed, phases, rng);
}

std::string sidecar_path(const std::string& csv_path) {
    if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
        return csv_path.substr(0, csv_path.size() - 4) + ".meta.json";
    return csv_path + ".meta.json";
}

void save_dataset(const Dataset& ds, const std::string& csv_path) {
    std::ostringstream csv;
    csv << "k,u,y,y_clean,v,rho\n";
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        csv << (i + 1) << ',' << fmt17(ds.u.samples[i]) << ',' << fmt17(ds.y[i]) << ','
            << fmt17(ds.y_clean[i]) << ',' << fmt17(ds.v[i]) << ',' << fmt17(ds.rho[i]) << '\n';
    }
    write_atomic(csv_path, csv.str());

    nlohmann::json meta;
    meta["N"] = ds.size();
    meta["t_s"] = ds.t_s;
    meta["sigma_v"] = ds.sigma_v;
    meta["seed"] = ds.seed;
    write_atomic(sidecar_path(csv_path), meta.dump(2) + "\n");
}

Dataset load_dataset(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open dataset: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty dataset file: " + csv_path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "k,u,y,y_clean,v,rho")
        throw IoError("dataset header mismatch in " + csv_path + ": got '" + line + "'");

    std::vector<std::array<double, 6>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 6> row{};
        std::stringstream ss(line);
        std::string field;
        for (int c = 0; c < 6; ++c) {
            if (!std::getline(ss, field, ','))
                throw IoError("dataset row " + std::to_string(line_no) + " has too few fields");
            std::size_t pos = 0;
            try {
                row[static_cast<std::size_t>(c)] = std::stod(field, &pos);
            } catch (const std::exception&) {
                throw IoError("dataset row " + std::to_string(line_no) + ": bad number '" +
                              field + "'");
            }
            if (pos != field.size())
                throw IoError("dataset row " + std::to_string(line_no) + ": bad number '" +
                              field + "'");
        }
        if (std::getline(ss, field, ','))
            throw IoError("dataset row " + std::to_string(line_no) + " has too many fields");
        rows.push_back(row);
    }
    if (rows.empty()) throw IoError("dataset has no samples: " + csv_path);

    std::ifstream meta_in(sidecar_path(csv_path));
    if (!meta_in) throw IoError("cannot open dataset sidecar: " + sidecar_path(csv_path));
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed dataset sidecar: " + std::string(e.what()));
    }

    Dataset ds;
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    ds.u.samples.resize(n);
    ds.y.resize(n);
    ds.y_clean.resize(n);
    ds.v.resize(n);
    ds.rho.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        ds.u.samples[i] = r[1];
        ds.y[i] = r[2];
        ds.y_clean[i] = r[3];
        ds.v[i] = r[4];
        ds.rho[i] = r[5];
    }
    try {
        ds.t_s = meta.at("t_s").get<double>();
        ds.sigma_v = meta.at("sigma_v").get<double>();
        ds.seed = meta.at("seed").get<std::uint64_t>();
        if (meta.at("N").get<Eigen::Index>() != n)
            throw IoError("dataset sidecar N disagrees with CSV row count");
    } catch (const nlohmann::json::exception& e) {
        throw IoError("dataset sidecar missing fields: " + std::string(e.what()));
    }
    ds.u.t_s = ds.t_s;
    return ds;
}

}  // namespace lpvio
