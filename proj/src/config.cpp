// config.cpp — JSON-schema subset validator and default filling

#include "bilayer/config.hpp"

#include "bilayer/errors.hpp"
#include "schema_text.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace bilayer::config {

namespace {

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

bool has_type(const json& v, const std::string& t) {
    if (t == "null") return v.is_null();
    if (t == "boolean") return v.is_boolean();
    if (t == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()));
    if (t == "number") return v.is_number();
    if (t == "string") return v.is_string();
    if (t == "array") return v.is_array();
    if (t == "object") return v.is_object();
    return false;
}

std::string type_list(const json& t) {
    if (t.is_string()) return t.get<std::string>();
    std::string s;
    for (const auto& x : t) s += (s.empty() ? "" : "|") + x.get<std::string>();
    return s;
}

void check(const json& v, const json& s, const std::string& ptr, std::vector<std::string>& errs) {
    const std::string where = ptr.empty() ? "/" : ptr;
    if (s.contains("type")) {
        const json& t = s["type"];
        bool ok = false;
        if (t.is_string()) ok = has_type(v, t.get<std::string>());
        else for (const auto& x : t) ok = ok || has_type(v, x.get<std::string>());
        if (!ok) {
            errs.push_back(fmt::format("{}: expected type {}, got {}", where, type_list(t), v.type_name()));
            return;
        }
    }
    if (s.contains("enum")) {
        bool ok = false;
        for (const auto& e : s["enum"]) ok = ok || e == v;
        if (!ok) errs.push_back(fmt::format("{}: value {} is not one of {}", where, v.dump(), s["enum"].dump()));
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (s.contains("minimum") && x < s["minimum"].get<double>())
            errs.push_back(fmt::format("{}: {} is below minimum {}", where, v.dump(), s["minimum"].dump()));
        if (s.contains("maximum") && x > s["maximum"].get<double>())
            errs.push_back(fmt::format("{}: {} is above maximum {}", where, v.dump(), s["maximum"].dump()));
        if (s.contains("exclusiveMinimum") && !(x > s["exclusiveMinimum"].get<double>()))
            errs.push_back(fmt::format("{}: {} must be > {}", where, v.dump(), s["exclusiveMinimum"].dump()));
        if (s.contains("exclusiveMaximum") && !(x < s["exclusiveMaximum"].get<double>()))
            errs.push_back(fmt::format("{}: {} must be < {}", where, v.dump(), s["exclusiveMaximum"].dump()));
    }
    if (v.is_string() && s.contains("minLength") &&
        v.get<std::string>().size() < s["minLength"].get<std::size_t>()) {
        errs.push_back(fmt::format("{}: string shorter than {}", where, s["minLength"].dump()));
    }
    if (v.is_object()) {
        const json props = s.value("properties", json::object());
        if (s.contains("required")) {
            for (const auto& r : s["required"]) {
                if (!v.contains(r.get<std::string>()))
                    errs.push_back(fmt::format("{}/{}: required property missing", ptr, escape_token(r.get<std::string>())));
            }
        }
        for (const auto& [key, val] : v.items()) {
            const std::string child = ptr + "/" + escape_token(key);
            if (props.contains(key)) {
                check(val, props[key], child, errs);
            } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
                errs.push_back(fmt::format("{}: unknown key", child));
            }
        }
    }
    if (v.is_array() && s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], fmt::format("{}/{}", ptr, i), errs);
    }
}

json fill(const json& v, const json& s) {
    if (!v.is_object() || !s.contains("properties")) return v;
    json out = v;
    for (const auto& [key, sub] : s["properties"].items()) {
        if (!out.contains(key) && sub.contains("default")) out[key] = sub["default"];
        if (out.contains(key)) {
            if (out[key].is_object()) out[key] = fill(out[key], sub);
            if (out[key].is_array() && sub.contains("items")) {
                for (auto& item : out[key]) item = fill(item, sub["items"]);
            }
        }
    }
    return out;
}

} // namespace

const std::string& schema_text() {
    static const std::string text = embedded::run_config_schema;
    return text;
}

const json& schema() {
    static const json s = json::parse(schema_text());
    return s;
}

std::vector<std::string> validate(const json& instance, const json& schema) {
    std::vector<std::string> errs;
    check(instance, schema, "", errs);
    return errs;
}

json fill_defaults(const json& instance, const json& schema) { return fill(instance, schema); }

json normalize(const json& instance) {
    // Validate the raw instance first so that unknown keys are reported before
    // defaults could mask anything, then validate the filled result.
    std::vector<std::string> errs = validate(instance, schema());
    json filled;
    if (errs.empty()) {
        filled = fill_defaults(instance, schema());
        errs = validate(filled, schema());
    }
    if (!errs.empty()) {
        std::string detail;
        for (const auto& e : errs) detail += (detail.empty() ? "" : "\n") + e;
        throw ConfigError("schema_violation", detail);
    }
    return filled;
}

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file_not_found", fmt::format("cannot open config file '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("json_syntax", fmt::format("{}: {}", path, e.what()));
    }
}

std::string canonical(const json& j) { return j.dump(2) + "\n"; }

} // namespace bilayer::config
