#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "spike/fem.hpp"
#include "spike/moser.hpp"
#include "spike/radial_profile.hpp"
#include "spike/sweep.hpp"

namespace spike::io {

namespace fs = std::filesystem;

/// "%.17g" rendering; round-trips every finite double.
std::string format_double(double v);

/// Mesh: `N_nodes N_triangles`, then `x y flag` per node, then `i j k` per
/// triangle (0-based).
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void write_mesh(const fs::path& path, const Mesh& mesh);
Mesh read_mesh(const fs::path& path);

/// Field: `N_nodes`, then one value per line. The count must match the mesh.
void write_field(std::ostream& out, const Field& u);
Field read_field(std::istream& in, std::shared_ptr<const Mesh> mesh);
void write_field(const fs::path& path, const Field& u);
Field read_field(const fs::path& path, std::shared_ptr<const Mesh> mesh);

/// Profile: `# amplitude theta r_max`, then `# <amplitude> <theta> <r_max>`,
/// then `r w dw` per sample.
void write_profile(std::ostream& out, const RadialProfile& p);
RadialProfile read_profile(std::istream& in);
void write_profile(const fs::path& path, const RadialProfile& p);
RadialProfile read_profile(const fs::path& path);

extern const char* const kSweepHeader;
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Reads the columns written by write_sweep_csv; fields not in the CSV stay default.
std::vector<SweepRow> read_sweep_csv(std::istream& in);
void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const fs::path& path);

extern const char* const kMoserHeader;
void write_moser_csv(std::ostream& out, const SharpnessTable& t);
void write_moser_csv(const fs::path& path, const SharpnessTable& t);

/// Pretty-printed JSON followed by a newline.
void write_json(const fs::path& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json(const fs::path& path);

}  // namespace spike::io
