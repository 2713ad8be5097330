#include "credo/pipeline.hpp"

#include "credo/annotate.hpp"

#include <json.hpp>

namespace credo {

using nlohmann::ordered_json;

AutocodeResult autocode(const ControllerSpec& spec) {
    AutocodeResult result;
    result.program = lower(spec);
    AnnotatedProgram annotated = annotate(spec, result.program);
    result.propagation = propagate(annotated);
    result.emission = emit_c(result.propagation.annotated, spec.x0);
    result.declared = result.propagation.annotated.contract_post.matrix;
    result.generated = result.propagation.final_ellipsoid.matrix;
    result.containment = check_final_containment(result.generated, result.declared);
    return result;
}

namespace {

ordered_json matrix_json(const RationalMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_display_decimal(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::string generation_report_json(const AutocodeResult& result) {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["containment"] = to_string(result.containment.status);
    if (result.containment.margin)
        j["containment_margin"] = to_display_decimal(*result.containment.margin);
    j["declared"] = matrix_json(result.declared);
    j["generated"] = matrix_json(result.generated);
    j["generated_support"] = result.propagation.final_ellipsoid.support;
    j["fraction_rendered_matrices"] = result.emission.fraction_rendered;

    ordered_json records = ordered_json::array();
    for (const auto& rec : result.propagation.records) {
        ordered_json r;
        r["rule"] = to_string(rec.rule);
        r["stmt"] = rec.stmt_index;
        if (!rec.multipliers.empty()) {
            ordered_json ms = ordered_json::array();
            ordered_json rs = ordered_json::array();
            for (const auto& m : rec.multipliers) {
                ms.push_back(to_display_decimal(m));
                rs.push_back(to_display_decimal(Rational(1) / m));
            }
            r["multipliers"] = ms;
            r["multiplier_reciprocals"] = rs;
        }
        r["out_support"] = rec.out_support;
        records.push_back(r);
    }
    j["records"] = records;

    ordered_json triples = ordered_json::array();
    for (const auto& t : result.propagation.annotated.triples) {
        ordered_json jt;
        jt["label"] = t.label;
        jt["rule"] = to_string(t.tactic);
        jt["stmt"] = t.stmt_index;
        jt["post_support"] = t.post.support;
        triples.push_back(jt);
    }
    j["triples"] = triples;
    return j.dump(2) + "\n";
}

}  // namespace credo
