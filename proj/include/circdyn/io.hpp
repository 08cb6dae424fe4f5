#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "circdyn/circle.hpp"
#include "circdyn/classifier.hpp"
#include "circdyn/errors.hpp"
#include "circdyn/measure.hpp"
#include "circdyn/partition.hpp"
#include "circdyn/pl_map.hpp"
#include "circdyn/rational.hpp"
#include "circdyn/shredder.hpp"

namespace circdyn::io {

using Json = nlohmann::ordered_json;

// Rationals are written as "num/den" strings; integers are also accepted on input.
inline Json to_json(const Rational& q) { return to_string(q); }

inline Rational rational_from(const Json& j)
{
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>()), 10));
    throw InvalidInput("expected a rational as \"num/den\", got " + j.dump());
}

inline Json to_json(const std::vector<Rational>& v)
{
    Json a = Json::array();
    for (const auto& q : v) a.push_back(to_json(q));
    return a;
}

inline std::vector<Rational> rationals_from(const Json& j)
{
    if (!j.is_array()) throw InvalidInput("expected an array of rationals");
    std::vector<Rational> out;
    for (const auto& e : j) out.push_back(rational_from(e));
    return out;
}

inline const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

inline void expect_type(const Json& j, const char* type)
{
    if (j.contains("type") && j.at("type") != type)
        throw InvalidInput(std::string("expected a ") + type + " document, got " + j.at("type").dump());
}

inline Json to_json(const Arc& a) { return Json{{"start", to_json(a.start().value())}, {"length", to_json(a.length())}}; }

inline Arc arc_from(const Json& j) { return Arc(CirclePoint(rational_from(field(j, "start"))), rational_from(field(j, "length"))); }

inline Json to_json(const std::vector<Arc>& arcs)
{
    Json a = Json::array();
    for (const auto& x : arcs) a.push_back(to_json(x));
    return a;
}

inline std::vector<Arc> arcs_from(const Json& j)
{
    std::vector<Arc> out;
    for (const auto& e : j) out.push_back(arc_from(e));
    return out;
}

// Maps.

inline Json to_json(const PLCircleMap& f)
{
    return Json{{"type", "pl_map"}, {"breakpoints", to_json(f.breakpoints())}, {"lift", to_json(f.lift_values())}};
}

inline PLCircleMap map_from(const Json& j)
{
    expect_type(j, "pl_map");
    return PLCircleMap(rationals_from(field(j, "breakpoints")), rationals_from(field(j, "lift")));
}

// Measures. Shorthands {"kind": "lebesgue"} and {"kind": "dirac", "at": x} are accepted on input.

inline Json to_json(const CircleMeasure& m)
{
    Json atoms = Json::array(), pieces = Json::array();
    for (const auto& a : m.atoms()) atoms.push_back({{"at", to_json(a.at.value())}, {"mass", to_json(a.mass)}});
    for (const auto& p : m.pieces())
        pieces.push_back({{"start", to_json(p.start)}, {"end", to_json(p.end)}, {"density", to_json(p.density)}});
    return Json{{"type", "measure"}, {"atoms", atoms}, {"pieces", pieces}};
}

inline CircleMeasure measure_from(const Json& j)
{
    expect_type(j, "measure");
    if (j.contains("kind")) {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "lebesgue") return CircleMeasure::lebesgue();
        if (kind == "dirac") return CircleMeasure::dirac(CirclePoint::wrap(rational_from(field(j, "at"))));
        throw InvalidInput("unknown measure kind \"" + kind + "\"");
    }
    std::vector<Atom> atoms;
    for (const auto& a : field(j, "atoms")) atoms.push_back({CirclePoint(rational_from(field(a, "at"))), rational_from(field(a, "mass"))});
    std::vector<std::pair<Arc, Rational>> pieces;
    for (const auto& p : field(j, "pieces")) {
        Rational s = rational_from(field(p, "start")), e = rational_from(field(p, "end"));
        if (!(s < e)) throw InvalidInput("density piece with start >= end");
        pieces.emplace_back(Arc(CirclePoint(s), Rational(e - s)), rational_from(field(p, "density")));
    }
    return CircleMeasure::from_parts(atoms, pieces);
}

// Cylinder specs: {"ell", "p", "values": {"word": "num/den"}}. Values may also be an
// array indexed by word value, and "level" is accepted for "p". Shorthands:
// {"kind": "lebesgue"|"dirac0", "ell", "p"} and {"kind": "bernoulli", "probs": [...], "p"}.

inline Json to_json(const CylinderSpec& s)
{
    Json values = Json::object();
    for (std::size_t i = 0; i < s.size(); ++i)
        values[Word::from_index(s.ell(), s.level(), Integer(static_cast<unsigned long>(i))).str()] = to_json(s[i]);
    return Json{{"type", "cylinder_spec"}, {"ell", s.ell()}, {"p", s.level()}, {"values", values}};
}

inline CylinderSpec spec_from(const Json& j)
{
    expect_type(j, "cylinder_spec");
    int level = (j.contains("p") ? j.at("p") : field(j, "level")).get<int>();
    if (j.contains("kind")) {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "bernoulli") return CylinderSpec::bernoulli(rationals_from(field(j, "probs")), level);
        int ell = field(j, "ell").get<int>();
        if (kind == "lebesgue") return CylinderSpec::lebesgue(ell, level);
        if (kind == "dirac0") return CylinderSpec::dirac_at_zero(ell, level);
        throw InvalidInput("unknown spec kind \"" + kind + "\"");
    }
    int ell = field(j, "ell").get<int>();
    const Json& values = field(j, "values");
    if (values.is_array()) return CylinderSpec(ell, level, rationals_from(values));
    if (!values.is_object()) throw InvalidInput("spec values must be an object keyed by word");
    if (ell < 2 || ell > 36 || level < 1) throw InvalidInput("spec: bad ell or p");
    Integer count = pow_int(ell, static_cast<unsigned long>(level));
    if (!count.fits_ulong_p() || count > Integer(1ul << 24)) throw InvalidInput("spec: ell^p too large");
    std::vector<std::optional<Rational>> slots(count.get_ui());
    for (const auto& [key, val] : values.items()) {
        Word w = Word::parse(ell, key);
        if (w.length() != level) throw InvalidInput("spec: word \"" + key + "\" does not have length p");
        auto& slot = slots[w.value().get_ui()];
        if (slot) throw InvalidInput("spec: duplicate word \"" + key + "\"");
        slot = rational_from(val);
    }
    std::vector<Rational> out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i])
            throw InvalidInput("spec: missing word \"" + Word::from_index(ell, level, Integer(static_cast<unsigned long>(i))).str() + "\"");
        out.push_back(*slots[i]);
    }
    return CylinderSpec(ell, level, std::move(out));
}

// Families are stored by their deepest level.

inline Json to_json(const ConsistentFamily& f)
{
    std::vector<Rational> lengths;
    for (const auto& a : f.levels.back()) lengths.push_back(a.length());
    return Json{{"type", "family"},
                {"ell", f.ell},
                {"depth", f.depth},
                {"basepoint", to_json(f.basepoint())},
                {"allow_degenerate", f.allow_degenerate},
                {"deepest", to_json(lengths)}};
}

inline ConsistentFamily family_from(const Json& j)
{
    expect_type(j, "family");
    bool degenerate = j.contains("allow_degenerate") && j.at("allow_degenerate").get<bool>();
    return family_from_lengths(field(j, "ell").get<int>(), field(j, "depth").get<int>(), rational_from(field(j, "basepoint")),
                               rationals_from(field(j, "deepest")), degenerate);
}

// Observables: {"breakpoints", "values"} or {"kind": "tent", "peak", "half_width", "height"}.

inline Json to_json(const Observable& o)
{
    return Json{{"type", "observable"}, {"breakpoints", to_json(o.breakpoints())}, {"values", to_json(o.values())}};
}

inline Observable observable_from(const Json& j)
{
    expect_type(j, "observable");
    if (j.contains("kind")) {
        if (j.at("kind") != "tent") throw InvalidInput("unknown observable kind " + j.at("kind").dump());
        Rational height = j.contains("height") ? rational_from(j.at("height")) : Rational(1);
        return Observable::tent(rational_from(field(j, "peak")), rational_from(field(j, "half_width")), height);
    }
    return Observable(rationals_from(field(j, "breakpoints")), rationals_from(field(j, "values")));
}

// Trapping reports.

inline Json to_json(const ShredVerdict& v)
{
    Json items = Json::array();
    for (const auto& it : v.items)
        items.push_back({{"item", it.item}, {"pass", it.pass}, {"slack", to_json(it.slack)}, {"witness", it.witness}});
    return items;
}

inline ShredVerdict verdict_from(const Json& j)
{
    ShredVerdict v;
    for (const auto& it : j)
        v.items.push_back({field(it, "item").get<std::string>(), field(it, "pass").get<bool>(), rational_from(field(it, "slack")),
                           field(it, "witness").get<std::string>()});
    return v;
}

inline Json to_json(const TrappingReport& r)
{
    Json subcells = Json::array(), interiors = Json::array(), anchors = Json::array(), regions = Json::array();
    for (const auto& s : r.subcells) subcells.push_back(to_json(s));
    for (const auto& s : r.interiors) interiors.push_back(to_json(s));
    for (const auto& row : r.anchors) {
        Json a = Json::array();
        for (const auto& p : row) a.push_back(to_json(p.value()));
        anchors.push_back(a);
    }
    for (const auto& g : r.regions)
        regions.push_back({{"orbit", g.orbit},
                           {"sub", g.sub},
                           {"cells", g.cells},
                           {"components", to_json(g.components)},
                           {"cycle", to_json(g.cycle)}});
    Json out{{"type", "trapping_report"},
             {"eps", to_json(r.eps)},
             {"delta", to_json(r.delta)},
             {"cell_count", r.cell_count},
             {"sub_count", r.sub_count},
             {"tau", r.tau},
             {"orbits", r.orbits},
             {"region_count", r.regions.size()},
             {"cells", to_json(r.cells)},
             {"subcells", subcells},
             {"interiors", interiors},
             {"anchors", anchors},
             {"regions", regions}};
    if (r.verdict) out["verdict"] = to_json(*r.verdict);
    return out;
}

inline TrappingReport report_from(const Json& j)
{
    expect_type(j, "trapping_report");
    TrappingReport r;
    r.eps = rational_from(field(j, "eps"));
    r.delta = rational_from(field(j, "delta"));
    r.cell_count = field(j, "cell_count").get<long>();
    r.sub_count = field(j, "sub_count").get<long>();
    r.tau = field(j, "tau").get<std::vector<long>>();
    r.orbits = field(j, "orbits").get<std::vector<std::vector<long>>>();
    r.cells = arcs_from(field(j, "cells"));
    for (const auto& s : field(j, "subcells")) r.subcells.push_back(arcs_from(s));
    for (const auto& s : field(j, "interiors")) r.interiors.push_back(arcs_from(s));
    for (const auto& row : field(j, "anchors")) {
        std::vector<CirclePoint> a;
        for (const auto& p : row) a.emplace_back(rational_from(p));
        r.anchors.push_back(std::move(a));
    }
    for (const auto& g : field(j, "regions")) {
        TrappingRegion t;
        t.orbit = field(g, "orbit").get<long>();
        t.sub = field(g, "sub").get<long>();
        t.cells = field(g, "cells").get<std::vector<long>>();
        t.components = arcs_from(field(g, "components"));
        t.cycle = arcs_from(field(g, "cycle"));
        r.regions.push_back(std::move(t));
    }
    if (j.contains("verdict")) r.verdict = verdict_from(j.at("verdict"));
    return r;
}

// Diagnostics.

inline Json to_json(const WDiagnostics& d)
{
    Json labels = Json::object();
    for (const auto& [name, v] : d.labels()) {
        Json ev = Json::object();
        for (const auto& [k, val] : v->evidence) ev[k] = val;
        labels[name] = {{"status", verdict_name(v->status)}, {"evidence", ev}};
    }
    return Json{{"type", "w_diagnostics"}, {"labels", labels}};
}

// Files.

inline Json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path);
    out << text;
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace circdyn::io
