#include "gbmcal/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gbmcal {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ProfileFile read_profile_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  ProfileFile out;
  std::string line;
  bool header_seen = false;
  std::vector<double> xs, us;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("normalized=");
      if (pos != std::string::npos) {
        const std::string val = trim(line.substr(pos + 11));
        out.normalized = (val.rfind("true", 0) == 0);
      }
      continue;
    }
    if (!header_seen) {
      std::string h = line;
      h.erase(std::remove_if(h.begin(), h.end(), ::isspace), h.end());
      if (h != "x,u") {
        throw std::runtime_error(path + ": expected header 'x,u', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path + ": malformed row '" + line + "'");
    xs.push_back(std::stod(line.substr(0, comma)));
    us.push_back(std::stod(line.substr(comma + 1)));
  }
  if (!header_seen) throw std::runtime_error(path + ": expected header 'x,u'");
  if (xs.empty()) throw std::runtime_error(path + ": no data rows");
  out.profile.x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  out.profile.u = Eigen::Map<Eigen::VectorXd>(us.data(), static_cast<Eigen::Index>(us.size()));
  return out;
}

void write_profile_csv(const std::string& path, const CellProfile& p, bool normalized) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(17);
  f << "# normalized=" << (normalized ? "true" : "false") << "\n";
  f << "x,u\n";
  for (Eigen::Index i = 0; i < p.x.size(); ++i) f << p.x[i] << ',' << p.u[i] << '\n';
}

std::map<std::string, std::string> read_keyvalue_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ": expected 'key = value', got '" + line + "'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

FixedConstants read_constants(const std::string& path) {
  const auto kv = read_keyvalue_file(path);
  FixedConstants c;
  const std::map<std::string, double*> fields = {
      {"D_n", &c.D_n},   {"D_O2", &c.D_O2}, {"tau_d", &c.tau_d},         {"alpha", &c.alpha},
      {"c_sat", &c.c_sat}, {"h2", &c.h2},   {"dh2", &c.dh2},             {"k_m", &c.k_m},
      {"w0", &c.w0},     {"L", &c.L},       {"T_horizon", &c.T_horizon}};
  for (const auto& [key, val] : kv) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw std::runtime_error(path + ": unknown constant '" + key + "'");
    *it->second = std::stod(val);
  }
  for (const auto& [name, ptr] : fields) {
    if (*ptr == 0.0) {
      throw std::runtime_error(path + ": missing required constant '" + name + "'");
    }
  }
  c.validate();
  return c;
}

void write_constants(const std::string& path, const FixedConstants& c) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(17);
  f << "D_n = " << c.D_n << "\nD_O2 = " << c.D_O2 << "\ntau_d = " << c.tau_d
    << "\nalpha = " << c.alpha << "\nc_sat = " << c.c_sat << "\nh2 = " << c.h2
    << "\ndh2 = " << c.dh2 << "\nk_m = " << c.k_m << "\nw0 = " << c.w0 << "\nL = " << c.L
    << "\nT_horizon = " << c.T_horizon << "\n";
}

ExperimentalDataset load_experimental_dataset(const std::string& data_csv,
                                              const std::string& u0_csv,
                                              const std::optional<std::string>& v0_csv,
                                              const FixedConstants& consts) {
  ExperimentalDataset ds;
  const ProfileFile data = read_profile_csv(data_csv);
  ds.x = data.profile.x;
  ds.z = data.normalized ? (data.profile.u * consts.c_sat).eval() : data.profile.u;

  const ProfileFile u0 = read_profile_csv(u0_csv);
  ds.u0 = u0.profile;
  if (u0.normalized) ds.u0.u *= consts.c_sat;

  if (v0_csv.has_value()) {
    const ProfileFile v0 = read_profile_csv(*v0_csv);
    ds.v0 = v0.profile;
    if (v0.normalized) ds.v0.u *= consts.c_sat;
  }
  return ds;
}

}  // namespace gbmcal
