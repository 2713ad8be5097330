#pragma once

#include "credo/ellipsoid.hpp"
#include "credo/matrix.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace credo {

enum class ObserverKind { Inductive, Assertive, Auto };

const char* to_string(ObserverKind k);

// A synchronous observer declared on the model: an ellipsoid bound over an
// ordered variable list, with the S-procedure multiplier mu.
struct ObserverSpec {
    std::string label;
    ObserverKind kind = ObserverKind::Auto;
    EllipsoidForm form = EllipsoidForm::QForm;
    RationalMatrix matrix;
    Rational mu;
    std::vector<std::string> variables;
};

// Discrete-time linear controller: x+ = A x + B y, u = C x + D y, with named
// states/inputs/outputs, an initial state, and the declared observers.
struct ControllerSpec {
    std::string name;
    RationalMatrix A, B, C, D;
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
    std::vector<Rational> x0;
    std::vector<ObserverSpec> observers;

    int n() const { return static_cast<int>(state_names.size()); }
    int m() const { return static_cast<int>(input_names.size()); }
    int k() const { return static_cast<int>(output_names.size()); }
};

class SpecError : public std::runtime_error {
public:
    SpecError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Parses and validates a controller spec from its JSON text. `source` names
// the input in diagnostics.
ControllerSpec parse_spec_json(const std::string& text, const std::string& source = "<string>");

ControllerSpec load_spec(const std::filesystem::path& path);

// Full invariant check (dimensions, name uniqueness, observer matrices).
void validate_spec(const ControllerSpec& spec);

}  // namespace credo
