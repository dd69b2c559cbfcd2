#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "magpauli/types.hpp"

namespace magpauli::io {

using json = nlohmann::json;

// shortest round-trip decimal, '.' separator regardless of locale
std::string num(double v);
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

struct Polyline {
  std::vector<PlanarPoint> points;
  std::string stroke = "#444";
  double width = 1.0;
  bool closed = false;
};
struct Marker {
  PlanarPoint at;
  std::string fill = "#000";
  double radius = 3.0;
};
std::string svg(const std::vector<Polyline>& lines, const std::vector<Marker>& markers, double xmin, double xmax,
                double ymin, double ymax, int width_px = 640);

std::string sha256_hex(const std::string& bytes);

struct Artifact {
  std::string name;
  std::string content;
};

// writes every artifact, then manifest.json with sizes and hashes; returns the manifest
json write_artifacts(const std::string& dir, const std::vector<Artifact>& artifacts, const json& meta);

std::string read_file(const std::string& path);
// parse failures are schema errors
json parse_json(const std::string& text, const std::string& origin);

json to_json(cplx z);
cplx cplx_of(const json& j, const std::string& what);

}  // namespace magpauli::io
