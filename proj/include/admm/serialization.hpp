#pragma once

#include <string>

#include <json.hpp>

#include "admm/instance_gen.hpp"
#include "admm/stationarity.hpp"

namespace admm {

// Doubles are encoded as C99 hex-float strings so that serialized instances
// round-trip bit exactly.
std::string double_to_hex(double v);
double hex_to_double(const std::string& s);

nlohmann::json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);  // row-major
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int rows, int cols);

nlohmann::json instance_to_json(const GeneratedInstance& instance);
GeneratedInstance instance_from_json(const nlohmann::json& j);

void save_instance(const GeneratedInstance& instance, const std::string& path);
GeneratedInstance load_instance(const std::string& path);

struct SavedCertificate {
  StationaryCertificate certificate;
  double rho = 0.0;
  double eta = 0.0;
  ToleranceMode mode = ToleranceMode::Relative;
  RelativeScales scales;
};

nlohmann::json certificate_to_json(const SavedCertificate& cert, const std::vector<int>& dims);
SavedCertificate certificate_from_json(const nlohmann::json& j);

void save_certificate(const SavedCertificate& cert, const std::vector<int>& dims, const std::string& path);
SavedCertificate load_certificate(const std::string& path);

}  // namespace admm
