#include "magpauli/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace magpauli::io {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += num(r[i]);
    }
    out += '\n';
  }
  return out;
}

std::string svg(const std::vector<Polyline>& lines, const std::vector<Marker>& markers, double xmin, double xmax,
                double ymin, double ymax, int width_px) {
  double sx = width_px / (xmax - xmin);
  int height_px = static_cast<int>(std::lround((ymax - ymin) * sx));
  auto px = [&](PlanarPoint p) { return num(std::round((p.x - xmin) * sx * 100) / 100); };
  auto py = [&](PlanarPoint p) { return num(std::round((ymax - p.y) * sx * 100) / 100); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\"" << height_px
    << "\" viewBox=\"0 0 " << width_px << ' ' << height_px << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"#999\"/>\n";
  for (const auto& l : lines) {
    if (l.points.size() < 2) continue;
    o << (l.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\""
      << num(l.width) << "\" points=\"";
    for (std::size_t i = 0; i < l.points.size(); ++i) o << (i ? " " : "") << px(l.points[i]) << ',' << py(l.points[i]);
    o << "\"/>\n";
  }
  for (const auto& m : markers)
    o << "<circle cx=\"" << px(m.at) << "\" cy=\"" << py(m.at) << "\" r=\"" << num(m.radius) << "\" fill=\""
      << m.fill << "\"/>\n";
  o << "</svg>\n";
  return o.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

static void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) fail(ErrorKind::Numerical, "cannot write " + p.string());
}

json write_artifacts(const std::string& dir, const std::vector<Artifact>& artifacts, const json& meta) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Numerical, "cannot create output directory " + dir + ": " + ec.message());
  json manifest = meta;
  manifest["artifacts"] = json::array();
  for (const auto& a : artifacts) {
    write_file(fs::path(dir) / a.name, a.content);
    manifest["artifacts"].push_back({{"name", a.name}, {"bytes", a.content.size()}, {"sha256", sha256_hex(a.content)}});
  }
  write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Schema, "cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Schema, origin + ": " + e.what());
  }
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_of(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::Schema, what + ": expected a number or [re, im]");
}

}  // namespace magpauli::io
