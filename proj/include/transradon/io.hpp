#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "xform.hpp"

namespace transradon {

// Arrays are stored as a JSON sidecar (kind, grid, payload name) next to a
// raw little-endian payload of interleaved (re, im) doubles.
struct StoredArray {
  std::string kind;  // "field", "sinogram" or "heisenberg"
  UniformGrid grid;
  std::vector<cplx> values;
  nlohmann::json meta = nlohmann::json::object();
};

namespace detail {

inline std::filesystem::path payload_path(const std::filesystem::path& sidecar) {
  auto p = sidecar;
  p.replace_extension(".bin");
  return p;
}

}  // namespace detail

inline void save_array(const std::filesystem::path& sidecar, const StoredArray& a) {
  require(a.values.size() == a.grid.size(), "save_array: value count does not match grid");
  auto bin = detail::payload_path(sidecar);
  nlohmann::json j{{"kind", a.kind},
                   {"shape", a.grid.shape},
                   {"origin", a.grid.origin},
                   {"spacing", a.grid.spacing},
                   {"dtype", "complex128-le"},
                   {"payload", bin.filename().string()},
                   {"meta", a.meta}};
  std::ofstream js(sidecar);
  require(bool(js), "save_array: cannot write " + sidecar.string());
  js << j.dump(2) << "\n";
  std::ofstream bs(bin, std::ios::binary);
  require(bool(bs), "save_array: cannot write " + bin.string());
  bs.write(reinterpret_cast<const char*>(a.values.data()),
           std::streamsize(a.values.size() * sizeof(cplx)));
  require(bool(bs), "save_array: short write to " + bin.string());
}

inline StoredArray load_array(const std::filesystem::path& sidecar) {
  std::ifstream js(sidecar);
  require(bool(js), "load_array: cannot read " + sidecar.string());
  nlohmann::json j = nlohmann::json::parse(js);
  StoredArray a;
  a.kind = j.at("kind").get<std::string>();
  a.grid = UniformGrid(j.at("shape").get<std::vector<std::size_t>>(),
                       j.at("origin").get<std::vector<double>>(),
                       j.at("spacing").get<std::vector<double>>());
  if (j.contains("meta")) a.meta = j["meta"];
  auto bin = sidecar.parent_path() / j.at("payload").get<std::string>();
  std::ifstream bs(bin, std::ios::binary);
  require(bool(bs), "load_array: cannot read " + bin.string());
  a.values.resize(a.grid.size());
  bs.read(reinterpret_cast<char*>(a.values.data()), std::streamsize(a.values.size() * sizeof(cplx)));
  require(bs.gcount() == std::streamsize(a.values.size() * sizeof(cplx)),
          "load_array: payload shorter than the grid");
  return a;
}

inline void save(const std::filesystem::path& p, const ScalarField& f) {
  save_array(p, {"field", f.grid, f.values, {}});
}
inline void save(const std::filesystem::path& p, const Sinogram& s) {
  save_array(p, {"sinogram", s.grid, s.values, {}});
}
inline void save(const std::filesystem::path& p, const HeisenbergSinogram& h) {
  save_array(p, {"heisenberg", h.grid, h.values, {}});
}

inline ScalarField as_field(const StoredArray& a) { return ScalarField(a.grid, a.values); }
inline Sinogram as_sinogram(const StoredArray& a) {
  require(a.kind == "sinogram", "as_sinogram: stored array is a " + a.kind);
  return Sinogram(a.grid, a.values);
}
inline HeisenbergSinogram as_heisenberg(const StoredArray& a) {
  require(a.kind == "heisenberg", "as_heisenberg: stored array is a " + a.kind);
  HeisenbergSinogram h(a.grid);
  h.values = a.values;
  return h;
}

}  // namespace transradon
