#include "lpvio/serialize.hpp"

#include <filesystem>
#include <fstream>

#include "lpvio/errors.hpp"

namespace lpvio {

namespace {

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const nlohmann::json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index at = 0;
    for (const auto& x : j) v[at++] = x.get<double>();
    return v;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json coeff_to_json(const CoefficientFunction& f) {
    nlohmann::json j;
    switch (f.variant()) {
        case CoeffVariant::Affine:
            j["variant"] = "affine";
            j["n_in"] = f.input_dim();
            j["n_out"] = f.output_dim();
            break;
        case CoeffVariant::Polynomial:
            j["variant"] = "polynomial";
            j["n_in"] = f.input_dim();
            j["n_out"] = f.output_dim();
            j["degree"] = f.degree();
            break;
        case CoeffVariant::Mlp:
            j["variant"] = "mlp";
            j["widths"] = f.widths();
            break;
    }
    j["phi"] = vector_to_json(get_params(f));
    return j;
}

CoefficientFunction coeff_from_json(const nlohmann::json& j) {
    try {
        const std::string variant = j.at("variant").get<std::string>();
        CoefficientFunction f = [&] {
            if (variant == "affine")
                return CoefficientFunction::affine(j.at("n_in").get<int>(),
                                                   j.at("n_out").get<int>());
            if (variant == "polynomial")
                return CoefficientFunction::polynomial(j.at("n_in").get<int>(),
                                                       j.at("n_out").get<int>(),
                                                       j.at("degree").get<int>());
            if (variant == "mlp")
                return CoefficientFunction::mlp(j.at("widths").get<std::vector<int>>());
            throw IoError("unknown coefficient variant: " + variant);
        }();
        set_params(f, vector_from_json(j.at("phi")));
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed coefficient function JSON: " + std::string(e.what()));
    }
}

nlohmann::json model_to_json(const StableLpvIoModel& m) {
    nlohmann::json j;
    j["kind"] = "stable";
    j["structure"] = {{"n_a", m.structure().n_a}, {"n_b", m.structure().n_b}};
    j["xw"] = {{"d", vector_to_json(m.xw().d)}, {"off", vector_to_json(m.xw().off)}};
    j["net"] = coeff_to_json(m.net());
    const RiccatiSolution& cert = m.certificate();
    j["certificate"] = {{"P", matrix_to_json(cert.P)},
                        {"q", cert.q},
                        {"x_q", cert.x_q},
                        {"center", vector_to_json(cert.center.transpose())},
                        {"residual_norm", cert.residual_norm}};
    return j;
}

nlohmann::json model_to_json(const LpvIoModel& m) {
    nlohmann::json j;
    j["kind"] = "plain";
    j["structure"] = {{"n_a", m.structure.n_a}, {"n_b", m.structure.n_b}};
    j["coeffs"] = coeff_to_json(m.coeffs);
    return j;
}

StableLpvIoModel stable_model_from_json(const nlohmann::json& j) {
    try {
        const LpvIoStructure st(j.at("structure").at("n_a").get<int>(),
                                j.at("structure").at("n_b").get<int>());
        XwFactor xw{vector_from_json(j.at("xw").at("d")),
                    vector_from_json(j.at("xw").at("off"))};
        return StableLpvIoModel(st, coeff_from_json(j.at("net")), std::move(xw));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed stable model JSON: " + std::string(e.what()));
    }
}

LpvIoModel io_model_from_json(const nlohmann::json& j) {
    try {
        const LpvIoStructure st(j.at("structure").at("n_a").get<int>(),
                                j.at("structure").at("n_b").get<int>());
        return LpvIoModel(st, coeff_from_json(j.at("coeffs")));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed model JSON: " + std::string(e.what()));
    }
}

IdentModel any_model_from_json(const nlohmann::json& j) {
    std::string kind;
    try {
        kind = j.at("kind").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model JSON lacks a 'kind' field: " + std::string(e.what()));
    }
    if (kind == "stable") return stable_model_from_json(j);
    if (kind == "plain") return io_model_from_json(j);
    throw IoError("unknown model kind: " + kind);
}

nlohmann::json ident_result_to_json(const IdentResult& r) {
    nlohmann::json j;
    j["phi_star"] = vector_to_json(r.phi_star);
    j["v_n"] = r.v_n;
    j["iterations"] = r.iterations;
    j["termination"] = r.termination;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& rec : r.loss_trace)
        trace.push_back({{"iter", rec.iter},
                         {"loss", rec.loss},
                         {"lambda", rec.lambda},
                         {"accepted", rec.accepted}});
    j["loss_trace"] = std::move(trace);
    return j;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open JSON file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const nlohmann::json& j, const std::string& path) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << j.dump(2) << "\n";
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename failed: " + target.string() + ": " + ec.message());
}

}  // namespace lpvio
