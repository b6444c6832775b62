#include "sarnav/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "sarnav/digest.hpp"
#include "sarnav/errors.hpp"

namespace sarnav {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

template <typename T>
void put_le(std::string& buf, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  buf.append(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const char* p) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot open " + path.string() + " for writing");
  return out;
}

// Reads the JSON header line and the remaining payload of a file.
std::pair<json, std::string> read_header_and_payload(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw RuntimeError(path.string() + ": missing header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw RuntimeError(path.string() + ": bad header: " + e.what());
  }
  std::ostringstream rest;
  rest << in.rdbuf();
  return {header, rest.str()};
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  traj.validate();
  json header = {{"count", traj.size()},
                 {"dt", traj.dt},
                 {"nu_n", {traj.nu_n.x(), traj.nu_n.y(), traj.nu_n.z()}}};
  std::string buf = header.dump() + "\n";
  for (const NavState& s : traj.samples) {
    put_le(buf, s.t);
    for (int k = 0; k < 3; ++k) put_le(buf, s.p_n[k]);
    for (int k = 0; k < 3; ++k) put_le(buf, s.v_n[k]);
    put_le(buf, s.q_bn.w());
    put_le(buf, s.q_bn.x());
    put_le(buf, s.q_bn.y());
    put_le(buf, s.q_bn.z());
  }
  std::ofstream out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  auto [header, payload] = read_header_and_payload(path);
  const auto count = header.at("count").get<std::size_t>();
  constexpr std::size_t kRowBytes = 11 * sizeof(double);
  if (payload.size() != count * kRowBytes) {
    throw RuntimeError(path.string() + ": payload size does not match count");
  }
  Trajectory traj;
  traj.dt = header.at("dt").get<double>();
  const auto nu = header.at("nu_n").get<std::vector<double>>();
  if (nu.size() != 3) throw RuntimeError(path.string() + ": nu_n must have 3 entries");
  traj.nu_n = Vec3(nu[0], nu[1], nu[2]);
  traj.samples.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const char* row = payload.data() + k * kRowBytes;
    double v[11];
    for (int c = 0; c < 11; ++c) v[c] = get_le<double>(row + c * sizeof(double));
    NavState& s = traj.samples[k];
    s.t = v[0];
    s.p_n = Vec3(v[1], v[2], v[3]);
    s.v_n = Vec3(v[4], v[5], v[6]);
    s.q_bn = Quat(v[7], v[8], v[9], v[10]);
  }
  return traj;
}

std::string radar_params_hash(const RadarParams& params) {
  std::ostringstream s;
  s << std::setprecision(17) << params.carrier_wavelength << ' ' << params.range_resolution << ' '
    << params.range_bin_spacing << ' ' << params.n_range_bins << ' '
    << params.range_window_start;
  return sha256_hex(s.str()).substr(0, 16);
}

void write_sar_image(const std::filesystem::path& path, const SarImage& img,
                     const RadarParams& params) {
  const ImageGrid& g = img.grid;
  json header = {{"n_at", g.n_at},
                 {"n_ct", g.n_ct},
                 {"center", {g.center.x(), g.center.y(), g.center.z()}},
                 {"at_spacing", g.at_spacing},
                 {"ct_spacing", g.ct_spacing},
                 {"params_hash", radar_params_hash(params)}};
  std::string buf = header.dump() + "\n";
  buf.reserve(buf.size() + img.pixels.size() * 2 * sizeof(float));
  for (const Complex& c : img.pixels) {
    put_le(buf, static_cast<float>(c.real()));
    put_le(buf, static_cast<float>(c.imag()));
  }
  std::ofstream out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

StoredImage read_sar_image(const std::filesystem::path& path) {
  auto [header, payload] = read_header_and_payload(path);
  StoredImage out;
  ImageGrid& g = out.image.grid;
  g.n_at = header.at("n_at").get<std::size_t>();
  g.n_ct = header.at("n_ct").get<std::size_t>();
  const auto c = header.at("center").get<std::vector<double>>();
  if (c.size() != 3) throw RuntimeError(path.string() + ": center must have 3 entries");
  g.center = Vec3(c[0], c[1], c[2]);
  g.at_spacing = header.at("at_spacing").get<double>();
  g.ct_spacing = header.at("ct_spacing").get<double>();
  out.params_hash = header.at("params_hash").get<std::string>();
  if (payload.size() != g.size() * 2 * sizeof(float)) {
    throw RuntimeError(path.string() + ": payload size does not match image shape");
  }
  out.image.pixels.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const char* p = payload.data() + 2 * k * sizeof(float);
    out.image.pixels[k] = Complex(get_le<float>(p), get_le<float>(p + sizeof(float)));
  }
  return out;
}

void write_magnitude_csv(const std::filesystem::path& path, const SarImage& img) {
  std::ofstream out = open_out(path);
  out << std::setprecision(9);
  for (std::size_t i = 0; i < img.grid.n_at; ++i) {
    for (std::size_t j = 0; j < img.grid.n_ct; ++j) {
      if (j) out << ',';
      out << std::abs(img.at(i, j));
    }
    out << '\n';
  }
}

void write_f32_le(std::ostream& out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    std::string buf;
    buf.reserve(values.size_bytes());
    for (float v : values) put_le(buf, v);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw RuntimeError("tensor write failed");
}

std::vector<float> read_f32_le(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  const std::string bytes = s.str();
  if (bytes.size() % sizeof(float) != 0) {
    throw RuntimeError(path.string() + ": size is not a multiple of 4 bytes");
  }
  std::vector<float> out(bytes.size() / sizeof(float));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = get_le<float>(bytes.data() + 4 * k);
  return out;
}

}  // namespace sarnav
