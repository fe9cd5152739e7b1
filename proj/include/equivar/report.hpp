#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace equivar {

/// Deterministic JSON value: object keys keep insertion order and floats
/// print with 17 significant digits, so identical inputs serialize to
/// byte-identical text.
class Json {
public:
    static Json object() { return Json(Kind::Object); }
    static Json array() { return Json(Kind::Array); }
    Json() : Json(Kind::Null) {}
    Json(bool b) : kind_(Kind::Bool), bool_(b) {}
    Json(long long i) : kind_(Kind::Int), int_(i) {}
    Json(int i) : Json((long long)i) {}
    Json(double d) : kind_(Kind::Double), double_(d) {}
    Json(const char* s) : kind_(Kind::String), string_(s) {}
    Json(std::string s) : kind_(Kind::String), string_(std::move(s)) {}

    Json& set(const std::string& key, Json value);
    Json& push(Json value);

    std::string dump(int indent = 2) const;

private:
    enum class Kind { Null, Bool, Int, Double, String, Object, Array };
    explicit Json(Kind k) : kind_(k) {}
    void dump_to(std::string& out, int indent, int depth) const;

    Kind kind_;
    bool bool_ = false;
    long long int_ = 0;
    double double_ = 0.0;
    std::string string_;
    std::vector<std::pair<std::string, Json>> members_;
    std::vector<Json> elements_;
};

/// %.17g with -0 normalized to 0.
std::string format_double(double v);

/// FNV-1a 64-bit hash of a byte string, in hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace equivar
