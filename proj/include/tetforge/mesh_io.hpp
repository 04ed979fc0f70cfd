#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tetforge/error.hpp"
#include "tetforge/mesh.hpp"

namespace tetforge {

enum class MeshFormat { Medit, VtkLegacy };

/// ".mesh" -> Medit, ".vtk" -> VTK legacy.
inline std::optional<MeshFormat> format_from_path(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".mesh") return MeshFormat::Medit;
  if (ext == ".vtk") return MeshFormat::VtkLegacy;
  return std::nullopt;
}

inline std::optional<MeshFormat> parse_format_name(std::string_view s) {
  if (s == "medit" || s == "mesh") return MeshFormat::Medit;
  if (s == "vtk" || s == "vtk-legacy") return MeshFormat::VtkLegacy;
  return std::nullopt;
}

namespace detail {

/// Whitespace tokenizer that remembers the source line of each token.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    while (pos_ >= tokens_.size()) {
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      tokens_.clear();
      pos_ = 0;
      if (auto hash = line.find('#'); hash != std::string::npos && !keep_hash_) line.resize(hash);
      std::istringstream ss(line);
      std::string t;
      while (ss >> t) tokens_.push_back(t);
    }
    tok = tokens_[pos_++];
    return true;
  }

  std::string expect_token(const char* what) {
    std::string t;
    if (!next(t)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_no_);
    return t;
  }

  long long expect_int(const char* what) {
    const auto t = expect_token(what);
    long long v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
      throw ParseError(std::string("expected integer ") + what + ", got '" + t + "'", line_no_);
    return v;
  }

  double expect_real(const char* what) {
    const auto t = expect_token(what);
    double v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
      throw ParseError(std::string("expected number ") + what + ", got '" + t + "'", line_no_);
    return v;
  }

  /// Drops the rest of the current line (VTK header lines are free text).
  std::string rest_of_line() {
    std::string out;
    while (pos_ < tokens_.size()) {
      if (!out.empty()) out += ' ';
      out += tokens_[pos_++];
    }
    return out;
  }

  std::string raw_line() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("unexpected end of file", line_no_);
    ++line_no_;
    tokens_.clear();
    pos_ = 0;
    return line;
  }

  void set_keep_hash(bool k) { keep_hash_ = k; }
  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  bool keep_hash_ = false;
};

inline std::string format_real(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline Index checked_index(long long one_based_or_zero, long long nv, long long offset,
                           std::size_t line, const char* what) {
  const long long i = one_based_or_zero - offset;
  if (i < 0 || (nv >= 0 && i >= nv))
    throw ParseError(std::string(what) + " index " + std::to_string(one_based_or_zero) +
                         " out of range (" + std::to_string(nv) + " vertices)",
                     line);
  return static_cast<Index>(i);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Medit ASCII

inline TetMesh read_medit(std::istream& in) {
  detail::TokenReader rd(in);
  TetMesh m;
  // Connectivity may precede Vertices, so range checks are deferred with
  // the source line of each record.
  struct Pending {
    std::size_t line;
    long long idx;
  };
  std::vector<Pending> pending;
  bool have_vertices = false;
  bool ended = false;

  auto read_index = [&](const char* what) -> Index {
    const long long raw = rd.expect_int(what);
    const std::size_t line = rd.line();
    if (have_vertices)
      return detail::checked_index(raw, static_cast<long long>(m.vertices.size()), 1, line, what);
    if (raw < 1) throw ParseError(std::string(what) + " index " + std::to_string(raw) + " out of range", line);
    pending.push_back({line, raw});
    return static_cast<Index>(raw - 1);
  };

  static const std::map<std::string, int> kSkippable{
      {"Edges", 3},           {"Corners", 1},      {"RequiredVertices", 1},
      {"Ridges", 1},          {"RequiredEdges", 1}, {"Quadrilaterals", 5},
      {"Hexahedra", 9},       {"Normals", 3},      {"NormalAtVertices", 2},
      {"Tangents", 3},        {"TangentAtVertices", 2}, {"RequiredTriangles", 1}};

  std::string kw;
  bool saw_dimension = false;
  while (rd.next(kw)) {
    if (kw == "MeshVersionFormatted") {
      const auto ver = rd.expect_int("mesh version");
      if (ver < 1 || ver > 2) throw ParseError("unsupported MeshVersionFormatted " + std::to_string(ver), rd.line());
    } else if (kw == "Dimension") {
      const auto dim = rd.expect_int("dimension");
      if (dim != 3) throw ParseError("only 3D meshes are supported, got Dimension " + std::to_string(dim), rd.line());
      saw_dimension = true;
    } else if (kw == "Vertices") {
      const auto n = rd.expect_int("vertex count");
      if (n < 0) throw ParseError("negative vertex count", rd.line());
      m.vertices.reserve(n);
      m.vertex_ref.reserve(n);
      for (long long i = 0; i < n; ++i) {
        const double x = rd.expect_real("x");
        const double y = rd.expect_real("y");
        const double z = rd.expect_real("z");
        m.vertices.emplace_back(x, y, z);
        m.vertex_ref.push_back(static_cast<int>(rd.expect_int("vertex ref")));
      }
      have_vertices = true;
    } else if (kw == "Tetrahedra") {
      const auto n = rd.expect_int("tet count");
      if (n < 0) throw ParseError("negative tet count", rd.line());
      m.tets.reserve(n);
      for (long long i = 0; i < n; ++i) {
        Tet t;
        for (auto& v : t) v = read_index("tet vertex");
        m.tets.push_back(t);
        m.tet_ref.push_back(static_cast<int>(rd.expect_int("tet ref")));
      }
    } else if (kw == "Triangles") {
      const auto n = rd.expect_int("triangle count");
      if (n < 0) throw ParseError("negative triangle count", rd.line());
      for (long long i = 0; i < n; ++i) {
        Tri t;
        for (auto& v : t) v = read_index("triangle vertex");
        m.surface_tris.push_back(t);
        m.tri_ref.push_back(static_cast<int>(rd.expect_int("triangle ref")));
      }
    } else if (auto it = kSkippable.find(kw); it != kSkippable.end()) {
      const auto n = rd.expect_int("record count");
      for (long long i = 0; i < n * it->second; ++i) rd.expect_token("record field");
    } else if (kw == "End") {
      ended = true;
      break;
    } else {
      throw ParseError("unknown Medit keyword '" + kw + "'", rd.line());
    }
  }
  if (!saw_dimension) throw ParseError("missing Dimension header", rd.line());
  (void)ended;
  const auto nv = static_cast<long long>(m.vertices.size());
  for (const auto& p : pending) detail::checked_index(p.idx, nv, 1, p.line, "element vertex");
  m.fill_attributes();
  return m;
}

inline void write_medit(std::ostream& out, const TetMesh& m) {
  out << "MeshVersionFormatted 2\nDimension 3\n";
  out << "Vertices\n" << m.vertices.size() << '\n';
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const auto& p = m.vertices[i];
    out << detail::format_real(p.x()) << ' ' << detail::format_real(p.y()) << ' '
        << detail::format_real(p.z()) << ' ' << (i < m.vertex_ref.size() ? m.vertex_ref[i] : 0)
        << '\n';
  }
  out << "Tetrahedra\n" << m.tets.size() << '\n';
  for (std::size_t i = 0; i < m.tets.size(); ++i) {
    const auto& t = m.tets[i];
    out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' ' << t[3] + 1 << ' '
        << (i < m.tet_ref.size() ? m.tet_ref[i] : 0) << '\n';
  }
  if (!m.surface_tris.empty()) {
    out << "Triangles\n" << m.surface_tris.size() << '\n';
    for (std::size_t i = 0; i < m.surface_tris.size(); ++i) {
      const auto& t = m.surface_tris[i];
      out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' '
          << (i < m.tri_ref.size() ? m.tri_ref[i] : 0) << '\n';
    }
  }
  out << "End\n";
}

// ---------------------------------------------------------------------------
// VTK legacy ASCII (unstructured grid). Tets are cell type 10, surface
// triangles type 5. Point/cell scalars named "ref" carry the reference tags.

inline constexpr int kVtkTriangle = 5;
inline constexpr int kVtkTetra = 10;

inline TetMesh read_vtk(std::istream& in) {
  detail::TokenReader rd(in);
  rd.set_keep_hash(true);
  const std::string magic = rd.raw_line();
  if (magic.rfind("# vtk DataFile", 0) != 0) throw ParseError("missing '# vtk DataFile' header", rd.line());
  rd.raw_line();  // title
  rd.set_keep_hash(false);
  if (rd.expect_token("ASCII") != "ASCII") throw ParseError("only ASCII VTK files are supported", rd.line());
  if (rd.expect_token("DATASET") != "DATASET" || rd.expect_token("UNSTRUCTURED_GRID") != "UNSTRUCTURED_GRID")
    throw ParseError("expected DATASET UNSTRUCTURED_GRID", rd.line());

  TetMesh m;
  struct Cell {
    std::vector<Index> ids;
    std::size_t line;
  };
  std::vector<Cell> cells;
  std::vector<int> types;
  std::vector<int> cell_ref;
  bool data_is_cell = false;
  long long data_count = -1;

  std::string kw;
  while (rd.next(kw)) {
    if (kw == "POINTS") {
      const auto n = rd.expect_int("point count");
      rd.expect_token("point type");
      if (n < 0) throw ParseError("negative point count", rd.line());
      m.vertices.reserve(n);
      for (long long i = 0; i < n; ++i) {
        const double x = rd.expect_real("x");
        const double y = rd.expect_real("y");
        const double z = rd.expect_real("z");
        m.vertices.emplace_back(x, y, z);
      }
    } else if (kw == "CELLS") {
      const auto n = rd.expect_int("cell count");
      rd.expect_int("cell list size");
      cells.reserve(n);
      for (long long i = 0; i < n; ++i) {
        const auto k = rd.expect_int("cell size");
        Cell c;
        for (long long j = 0; j < k; ++j) {
          const auto raw = rd.expect_int("cell vertex");
          c.ids.push_back(detail::checked_index(raw, static_cast<long long>(m.vertices.size()), 0,
                                                rd.line(), "cell vertex"));
        }
        c.line = rd.line();
        cells.push_back(std::move(c));
      }
    } else if (kw == "CELL_TYPES") {
      const auto n = rd.expect_int("cell type count");
      for (long long i = 0; i < n; ++i) types.push_back(static_cast<int>(rd.expect_int("cell type")));
    } else if (kw == "CELL_DATA" || kw == "POINT_DATA") {
      data_is_cell = kw == "CELL_DATA";
      data_count = rd.expect_int("data count");
    } else if (kw == "SCALARS") {
      // Only "ref" scalars are imported; other arrays are read and dropped.
      if (data_count < 0) throw ParseError("SCALARS outside CELL_DATA/POINT_DATA", rd.line());
      const std::string name = rd.expect_token("scalar name");
      rd.expect_token("scalar type");
      std::string lut = rd.expect_token("LOOKUP_TABLE");
      if (lut != "LOOKUP_TABLE") {
        if (lut != "1") throw ParseError("only single-component scalars are supported", rd.line());
        lut = rd.expect_token("LOOKUP_TABLE");
        if (lut != "LOOKUP_TABLE") throw ParseError("expected LOOKUP_TABLE", rd.line());
      }
      rd.expect_token("table name");
      std::vector<int> vals;
      vals.reserve(data_count);
      for (long long i = 0; i < data_count; ++i)
        vals.push_back(static_cast<int>(std::lround(rd.expect_real("scalar value"))));
      if (name == "ref") (data_is_cell ? cell_ref : m.vertex_ref) = std::move(vals);
    } else {
      throw ParseError("unknown VTK section '" + kw + "'", rd.line());
    }
  }

  if (types.size() != cells.size()) throw ParseError("CELL_TYPES count does not match CELLS", rd.line());
  const bool use_cell_ref = cell_ref.size() == cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const int ref = use_cell_ref ? cell_ref[i] : 0;
    if (types[i] == kVtkTetra) {
      if (c.ids.size() != 4) throw ParseError("tetra cell with " + std::to_string(c.ids.size()) + " vertices", c.line);
      m.tets.push_back({c.ids[0], c.ids[1], c.ids[2], c.ids[3]});
      m.tet_ref.push_back(ref);
    } else if (types[i] == kVtkTriangle) {
      if (c.ids.size() != 3) throw ParseError("triangle cell with " + std::to_string(c.ids.size()) + " vertices", c.line);
      m.surface_tris.push_back({c.ids[0], c.ids[1], c.ids[2]});
      m.tri_ref.push_back(ref);
    } else {
      throw ParseError("unsupported VTK cell type " + std::to_string(types[i]), c.line);
    }
  }
  if (m.vertex_ref.size() != m.vertices.size()) m.vertex_ref.assign(m.vertices.size(), 0);
  m.fill_attributes();
  return m;
}

inline void write_vtk(std::ostream& out, const TetMesh& m) {
  out << "# vtk DataFile Version 3.0\ntetforge mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << m.vertices.size() << " double\n";
  for (const auto& p : m.vertices)
    out << detail::format_real(p.x()) << ' ' << detail::format_real(p.y()) << ' '
        << detail::format_real(p.z()) << '\n';
  const std::size_t ncells = m.tets.size() + m.surface_tris.size();
  out << "CELLS " << ncells << ' ' << 5 * m.tets.size() + 4 * m.surface_tris.size() << '\n';
  for (const auto& t : m.tets) out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  for (const auto& t : m.surface_tris) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << ncells << '\n';
  for (std::size_t i = 0; i < m.tets.size(); ++i) out << kVtkTetra << '\n';
  for (std::size_t i = 0; i < m.surface_tris.size(); ++i) out << kVtkTriangle << '\n';
  out << "CELL_DATA " << ncells << "\nSCALARS ref int 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < m.tets.size(); ++i) out << (i < m.tet_ref.size() ? m.tet_ref[i] : 0) << '\n';
  for (std::size_t i = 0; i < m.surface_tris.size(); ++i) out << (i < m.tri_ref.size() ? m.tri_ref[i] : 0) << '\n';
  out << "POINT_DATA " << m.vertices.size() << "\nSCALARS ref int 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) out << (i < m.vertex_ref.size() ? m.vertex_ref[i] : 0) << '\n';
}

// ---------------------------------------------------------------------------
// Files

/// Writes via a sibling temp file and rename, so readers never see a
/// partially written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot write '" + path.string() + "'");
  }
}

inline TetMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    TetMesh m = format == MeshFormat::Medit ? read_medit(in) : read_vtk(in);
    return m;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

inline TetMesh load_mesh(const std::filesystem::path& path) {
  const auto f = format_from_path(path);
  if (!f) throw IoError("cannot infer mesh format from '" + path.string() + "'");
  return load_mesh(path, *f);
}

inline void save_mesh(const TetMesh& m, const std::filesystem::path& path, MeshFormat format) {
  validate(m);
  std::ostringstream ss;
  if (format == MeshFormat::Medit)
    write_medit(ss, m);
  else
    write_vtk(ss, m);
  write_file_atomic(path, ss.str());
}

}  // namespace tetforge
