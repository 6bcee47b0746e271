#pragma once

#include <string>

#include <json.hpp>

#include "tdinv/methods.hpp"

namespace tdinv::harness {

/// Header: k,res_total,res_w,res_h,res_y,err_theta,err_u_L2V,step_ms
std::string iterations_csv(const RunRecord& record);

/// Header: x,theta_true,theta_rec,u_err_final
std::string reconstruction_csv(const Vector& x, const Vector& theta_true, const Vector& theta_rec,
                               const Vector& u_err_final);

/// Writes the text to `path`, creating parent directories. Throws IoError with the path.
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);

/// Shortest round-trip decimal form, so equal doubles always print equally.
std::string format_double(double v);

}  // namespace tdinv::harness
