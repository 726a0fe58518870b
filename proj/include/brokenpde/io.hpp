#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "brokenpde/grid.hpp"
#include "brokenpde/nodal.hpp"

namespace brokenpde::io {

/// 17 significant digits, so values round-trip exactly.
std::string format_double(double v);

/// Header "x,y,value" (2D) or "x,value" (1D); one row per node, i fastest.
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);
/// Reads a field written by write_field_csv; the grid is inferred from the
/// coordinates, which must form a complete uniform tensor grid.
ScalarField read_field_csv(const std::filesystem::path& path);

/// Header "x,y,bx,by".
void write_vector_csv(const std::filesystem::path& path, const VectorField& f);
VectorField read_vector_csv(const std::filesystem::path& path);

/// Header "x1,y1,x2,y2".
void write_segments_csv(const std::filesystem::path& path, const std::vector<Segment>& segments);
/// Header "x,y,nx,ny,delta".
void write_normals_csv(const std::filesystem::path& path, const std::vector<NormalSample>& normals);

/// Writes a whole file with LF line endings, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Joins cells with commas, formatting numbers with format_double.
std::string csv_row(const std::vector<double>& cells);

}  // namespace brokenpde::io
