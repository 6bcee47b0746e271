#include "tdinv/harness/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tdinv/errors.hpp"

namespace tdinv::harness {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string iterations_csv(const RunRecord& record) {
    std::string out = "k,res_total,res_w,res_h,res_y,err_theta,err_u_L2V,step_ms\n";
    for (const IterationRow& r : record.rows) {
        out += std::to_string(r.k);
        for (double v : {r.res_total, r.res_w, r.res_h, r.res_y, r.err_theta, r.err_u_L2V, r.step_ms}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string reconstruction_csv(const Vector& x, const Vector& theta_true, const Vector& theta_rec,
                               const Vector& u_err_final) {
    if (theta_true.size() != x.size() || theta_rec.size() != x.size() || u_err_final.size() != x.size())
        throw ValidationError("reconstruction columns differ in length");
    std::string out = "x,theta_true,theta_rec,u_err_final\n";
    for (Index i = 0; i < x.size(); ++i) {
        out += format_double(x(i)) + ',' + format_double(theta_true(i)) + ',' + format_double(theta_rec(i)) + ',' +
               format_double(u_err_final(i)) + '\n';
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for '" + path + "': " + ec.message());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace tdinv::harness
