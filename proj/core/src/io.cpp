#include "duks/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "duks/error.hpp"

namespace duks {

namespace {

void append(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

void append_complex(std::string& out, Complex z) {
  out.push_back(',');
  append(out, z.real());
  out.push_back(',');
  append(out, z.imag());
}

}  // namespace

std::string format_double(double value) {
  std::string s;
  append(s, value);
  return s;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,k,re_u,im_u,re_v,im_v,re_Z,im_Z\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const SpectralField& v = traj.v[i];
    const SpectralField& z = traj.z[i];
    const int n = v.truncation();
    for (int k = -n; k <= n; ++k) {
      append(out, traj.times[i]);
      out.push_back(',');
      out += std::to_string(k);
      append_complex(out, v[k] + z[k]);
      append_complex(out, v[k]);
      append_complex(out, z[k]);
      out.push_back('\n');
    }
  }
  return out;
}

std::string amplitude_csv(const AmplitudeTrajectory& amp) {
  std::string out = "T,re_A1,im_A1,re_A3,im_A3,re_A2,im_A2,re_A4,im_A4,re_A6,im_A6\n";
  for (const AmplitudeState& s : amp.states) {
    append(out, s.slow_time);
    append_complex(out, s.a1);
    append_complex(out, s.a3);
    append_complex(out, s.slaved.a2);
    append_complex(out, s.slaved.a4);
    append_complex(out, s.slaved.a6);
    out.push_back('\n');
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot open " + tmp.string() + " for writing");
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    file.flush();
    if (!file) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " to " + path.string());
  }
}

}  // namespace duks
