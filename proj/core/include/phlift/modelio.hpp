#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phlift/lift.hpp"
#include "phlift/numerics.hpp"
#include "phlift/parse.hpp"
#include "phlift/system.hpp"

namespace phlift {

enum class ModelErrorKind {
  bad_header,
  syntax,
  missing_section,
  duplicate_section,
  shape_mismatch,
  undeclared_state,
  non_skew_operator,
  negative_resistance,
};

const char* to_string(ModelErrorKind k);

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrorKind kind, SourcePos pos, const std::string& message);
  ModelErrorKind kind;
  SourcePos pos;
};

// A parsed .phs document. Parameters are substituted while parsing, so the
// symbolic members are fully resolved; the bindings are kept only so
// print_model can write them back out.
struct ModelDoc {
  std::string name;
  Rat a = 0, b = 1;
  std::vector<std::string> states;
  MatDiffOp J{0, 0};
  JetPolynomial density;
  std::optional<Dissipation> dissipation;
  std::vector<std::pair<std::string, Rat>> params;

  int n() const { return static_cast<int>(states.size()); }
  AssembledSystem assemble() const;
};

// Compares the resolved content (name, domain, states, operator, density,
// dissipation). Parameter bindings are not part of the comparison: two
// documents that resolve to the same system are the same model.
bool operator==(const ModelDoc& x, const ModelDoc& y);
inline bool operator!=(const ModelDoc& x, const ModelDoc& y) { return !(x == y); }

ModelDoc parse_model(const std::string& text);
std::string print_model(const ModelDoc& doc);

// Models compiled into the library; the CLI resolves bare names against
// these before touching the filesystem.
std::vector<std::string> bundled_model_names();
std::string bundled_model_text(const std::string& name);

// `ref` is a bundled name ("kdv", also accepted with a .phs suffix) or a
// path to a model file.
ModelDoc load_model(const std::string& ref);

// Lifted coordinate names: the base state name with one "_z" suffix per
// derivative order, disambiguated if that collides with a declared name.
std::vector<std::string> lifted_state_names(const std::vector<std::string>& states,
                                            const LiftSpec& spec);

// The same model rewritten in lifted coordinates: derivative-free density,
// lifted operator, lifted input map when dissipative.
ModelDoc lifted_model_doc(const ModelDoc& original);

void write_trajectory_csv(std::ostream& os, const SemiDiscreteSystem& sd, const Trajectory& traj);

// Entry point used by the command-line tool. argv-style arguments without
// the program name. Returns the process exit code: 0 success, 1 a requested
// check failed, 2 usage or parse error.
int run_cli(const std::vector<std::string>& args);

}  // namespace phlift
