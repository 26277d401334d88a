#include "sidebandit/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sidebandit {

namespace {

double sigma_from_json(const nlohmann::json& v, std::size_t i, std::size_t j) {
    const std::string where = "sigma[" + std::to_string(i) + "][" + std::to_string(j) + "]";
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "Infinity" || s == "infinity") return kInf;
        throw ValidationError(ValidationCode::NonPositiveSigma, where + ": unrecognized value \"" + s + "\"");
    }
    if (!v.is_number()) throw ValidationError(ValidationCode::NonPositiveSigma, where + " must be a number or \"inf\"");
    const double x = v.get<double>();
    if (std::isnan(x) || x <= 0.0) {
        throw ValidationError(ValidationCode::NonPositiveSigma, where + " must be in (0, inf]");
    }
    return x;
}

}  // namespace

nlohmann::json sigma_to_json(double sigma) {
    if (sigma == kInf) return "inf";
    return sigma;
}

Instance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("means") || !j.contains("sigma")) {
        throw ValidationError(ValidationCode::BadMeans, "instance must be an object with \"means\" and \"sigma\"");
    }
    const auto& jm = j.at("means");
    const auto& js = j.at("sigma");
    if (!jm.is_array() || !js.is_array()) {
        throw ValidationError(ValidationCode::BadMeans, "\"means\" and \"sigma\" must be arrays");
    }
    Instance inst;
    for (const auto& v : jm) {
        if (!v.is_number()) throw ValidationError(ValidationCode::BadMeans, "means must be numbers");
        inst.means.push_back(v.get<double>());
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < js.size(); ++i) {
        if (!js[i].is_array()) throw ValidationError(ValidationCode::NonSquare, "sigma rows must be arrays");
        std::vector<double> row;
        for (std::size_t c = 0; c < js[i].size(); ++c) row.push_back(sigma_from_json(js[i][c], i, c));
        rows.push_back(std::move(row));
    }
    inst.feedback = FeedbackMatrix::from_rows(rows);
    validate(inst);
    return inst;
}

nlohmann::json instance_to_json(const Instance& instance) {
    nlohmann::json sigma = nlohmann::json::array();
    for (const auto& row : instance.feedback.rows()) {
        nlohmann::json jr = nlohmann::json::array();
        for (double s : row) jr.push_back(sigma_to_json(s));
        sigma.push_back(std::move(jr));
    }
    return {{"means", instance.means}, {"sigma", std::move(sigma)}};
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(ValidationCode::BadMeans, path.string() + ": " + e.what());
    }
    return instance_from_json(j);
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << instance_to_json(instance).dump(2) << '\n';
}

}  // namespace sidebandit
