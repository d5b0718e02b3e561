#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "orlicz_qha/phase_space.hpp"
#include "orlicz_qha/weyl_qha.hpp"
#include "orlicz_qha/young_function.hpp"

namespace oqha {

// {"family": ..., <params>, "r": ...}; params may also sit under "params".
nlohmann::json to_json(const YoungFunction& phi);
YoungFunction young_from_json(const nlohmann::json& j);
// Inline JSON text, or a path to a file holding it.
YoungFunction parse_young(const std::string& text_or_path);

// CSV with header "t_break,value".
void write_step_csv(std::ostream& os, const StepFunction& mu);
StepFunction read_step_csv(std::istream& is);

// Binary: 8-byte tag, u64 d, f64 L, u64 n, then little-endian f64 (re, im)
// pairs in row-major order. Operators use a distinct tag with d = 0, L = 0
// and n = N.
inline constexpr char kGridTag[9] = "OQHAGRD1";
inline constexpr char kOperatorTag[9] = "OQHAOPR1";

void write_grid_binary(std::ostream& os, const GridFunction& f);
GridFunction read_grid_binary(std::istream& is);
void write_operator_binary(std::ostream& os, const OperatorMatrix& A);
OperatorMatrix read_operator_binary(std::istream& is);

// "# gridfunction d=<d> L=<L> n=<n>" then one "re,im" row per point.
void write_grid_csv(std::ostream& os, const GridFunction& f);
GridFunction read_grid_csv(std::istream& is);

enum class FileKind { Grid, Operator, GridCsv, StepCsv, Unknown };
FileKind sniff_file(const std::string& path);

}  // namespace oqha
