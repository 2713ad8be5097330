#include "credo/spec_model.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace credo {

using nlohmann::json;

const char* to_string(ObserverKind k) {
    switch (k) {
        case ObserverKind::Inductive: return "inductive";
        case ObserverKind::Assertive: return "assertive";
        case ObserverKind::Auto: return "auto";
    }
    return "?";
}

namespace {

RationalMatrix matrix_field(const json& j, const std::string& field, int rows, int cols) {
    if (!j.contains(field)) throw SpecError(field, "missing matrix");
    const json& m = j.at(field);
    if (!m.is_array()) throw SpecError(field, "expected an array of rows");
    if (rows >= 0 && static_cast<int>(m.size()) != rows)
        throw SpecError(field, "expected " + std::to_string(rows) + " rows, got " +
                                   std::to_string(m.size()));
    std::vector<std::vector<std::string>> cells;
    int expected_cols = cols;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const json& row = m[i];
        if (!row.is_array())
            throw SpecError(field + "[" + std::to_string(i) + "]", "expected an array");
        if (expected_cols < 0) expected_cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != expected_cols)
            throw SpecError(field + "[" + std::to_string(i) + "]",
                            "expected " + std::to_string(expected_cols) + " entries, got " +
                                std::to_string(row.size()));
        std::vector<std::string> r;
        for (std::size_t jcol = 0; jcol < row.size(); ++jcol) {
            const json& cell = row[jcol];
            if (!cell.is_string())
                throw SpecError(field + "[" + std::to_string(i) + "][" + std::to_string(jcol) + "]",
                                "matrix entries must be decimal strings");
            r.push_back(cell.get<std::string>());
        }
        cells.push_back(std::move(r));
    }
    try {
        return RationalMatrix::from_strings(cells);
    } catch (const ParseError& e) {
        throw SpecError(field, e.what());
    }
}

std::vector<std::string> name_list(const json& j, const std::string& field) {
    if (!j.contains(field)) throw SpecError(field, "missing");
    const json& a = j.at(field);
    if (!a.is_array()) throw SpecError(field, "expected an array of identifiers");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_string())
            throw SpecError(field + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(a[i].get<std::string>());
    }
    return out;
}

ObserverSpec parse_observer(const json& j, std::size_t index) {
    std::string where = "observers[" + std::to_string(index) + "]";
    ObserverSpec obs;
    if (!j.contains("label") || !j.at("label").is_string())
        throw SpecError(where + ".label", "missing or not a string");
    obs.label = j.at("label").get<std::string>();
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw SpecError(where + ".kind", "missing or not a string");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "inductive")
        obs.kind = ObserverKind::Inductive;
    else if (kind == "assertive")
        obs.kind = ObserverKind::Assertive;
    else if (kind == "auto")
        obs.kind = ObserverKind::Auto;
    else
        throw SpecError(where + ".kind", "expected \"inductive\", \"assertive\" or \"auto\"");
    if (!j.contains("form") || !j.at("form").is_string())
        throw SpecError(where + ".form", "missing or not a string");
    std::string form = j.at("form").get<std::string>();
    if (form == "P")
        obs.form = EllipsoidForm::PForm;
    else if (form == "Q")
        obs.form = EllipsoidForm::QForm;
    else
        throw SpecError(where + ".form", "expected \"P\" or \"Q\"");
    obs.matrix = matrix_field(j, "matrix", -1, -1);
    if (!j.contains("mu") || !j.at("mu").is_string())
        throw SpecError(where + ".mu", "missing or not a decimal string");
    try {
        obs.mu = parse_decimal(j.at("mu").get<std::string>());
    } catch (const ParseError& e) {
        throw SpecError(where + ".mu", e.what());
    }
    obs.variables = name_list(j, "variables");
    return obs;
}

void check_unique(const std::vector<std::string>& names, const std::string& field) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw SpecError(field, "empty identifier");
        if (!seen.insert(n).second) throw SpecError(field, "duplicate identifier \"" + n + "\"");
    }
}

}  // namespace

ControllerSpec parse_spec_json(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(source, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError(source, "top level must be a JSON object");

    ControllerSpec spec;
    if (!j.contains("name") || !j.at("name").is_string())
        throw SpecError("name", "missing or not a string");
    spec.name = j.at("name").get<std::string>();
    spec.state_names = name_list(j, "states");
    spec.input_names = name_list(j, "inputs");
    spec.output_names = name_list(j, "outputs");

    int n = static_cast<int>(spec.state_names.size());
    int m = static_cast<int>(spec.input_names.size());
    int k = static_cast<int>(spec.output_names.size());
    spec.A = matrix_field(j, "A", n, n);
    spec.B = matrix_field(j, "B", n, m);
    spec.C = matrix_field(j, "C", k, n);
    spec.D = matrix_field(j, "D", k, m);

    auto x0 = name_list(j, "x0");
    if (static_cast<int>(x0.size()) != n)
        throw SpecError("x0", "expected " + std::to_string(n) + " entries, got " +
                                  std::to_string(x0.size()));
    for (std::size_t i = 0; i < x0.size(); ++i) {
        try {
            spec.x0.push_back(parse_decimal(x0[i]));
        } catch (const ParseError& e) {
            throw SpecError("x0[" + std::to_string(i) + "]", e.what());
        }
    }

    if (j.contains("observers")) {
        const json& obs = j.at("observers");
        if (!obs.is_array()) throw SpecError("observers", "expected an array");
        for (std::size_t i = 0; i < obs.size(); ++i)
            spec.observers.push_back(parse_observer(obs[i], i));
    }

    validate_spec(spec);
    return spec;
}

ControllerSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError(path.string(), "file not found or unreadable");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_json(buf.str(), path.string());
}

void validate_spec(const ControllerSpec& spec) {
    if (spec.name.empty()) throw SpecError("name", "must be nonempty");
    check_unique(spec.state_names, "states");
    check_unique(spec.input_names, "inputs");
    check_unique(spec.output_names, "outputs");
    {
        std::vector<std::string> all = spec.state_names;
        all.insert(all.end(), spec.input_names.begin(), spec.input_names.end());
        all.insert(all.end(), spec.output_names.begin(), spec.output_names.end());
        check_unique(all, "states/inputs/outputs");
    }

    int n = spec.n(), m = spec.m(), k = spec.k();
    auto dims = [&](const RationalMatrix& mat, int r, int c, const std::string& field) {
        // A zero-row matrix cannot declare a column count in JSON.
        if (mat.rows() == r && r == 0) return;
        if (mat.rows() != r || mat.cols() != c)
            throw SpecError(field, "expected " + std::to_string(r) + "x" + std::to_string(c) +
                                       ", got " + mat.shape_string());
    };
    dims(spec.A, n, n, "A");
    dims(spec.B, n, m, "B");
    dims(spec.C, k, n, "C");
    dims(spec.D, k, m, "D");
    if (static_cast<int>(spec.x0.size()) != n) throw SpecError("x0", "dimension mismatch");

    for (std::size_t i = 0; i < spec.observers.size(); ++i) {
        const ObserverSpec& obs = spec.observers[i];
        std::string where = "observers[" + std::to_string(i) + "] (" + obs.label + ")";
        if (obs.label.empty()) throw SpecError(where, "label must be nonempty");
        check_unique(obs.variables, where + ".variables");
        if (obs.variables.empty()) throw SpecError(where + ".variables", "must be nonempty");
        if (obs.matrix.rows() != obs.matrix.cols() ||
            obs.matrix.rows() != static_cast<int>(obs.variables.size()))
            throw SpecError(where + ".matrix",
                            "expected " + std::to_string(obs.variables.size()) + "x" +
                                std::to_string(obs.variables.size()) + ", got " +
                                obs.matrix.shape_string());
        if (!obs.matrix.is_symmetric()) throw SpecError(where + ".matrix", "not symmetric");
        if (!(obs.mu > 0 && obs.mu < 1))
            throw SpecError(where + ".mu", "multiplier must lie strictly between 0 and 1");
        if (obs.form == EllipsoidForm::PForm) {
            if (!ldlt_pd(obs.matrix))
                throw SpecError(where + ".matrix", "P-form matrix is not positive definite");
        } else if (!ldlt_psd(obs.matrix).proven_psd()) {
            throw SpecError(where + ".matrix", "Q-form matrix is not positive semidefinite");
        }
    }
}

}  // namespace credo
