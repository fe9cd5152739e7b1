#include "equivar/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace equivar {

std::string format_double(double v) {
    if (!std::isfinite(v))
        throw std::runtime_error("format_double: non-finite value in report");
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

Json& Json::set(const std::string& key, Json value) {
    if (kind_ != Kind::Object)
        throw std::logic_error("Json::set on non-object");
    members_.emplace_back(key, std::move(value));
    return *this;
}

Json& Json::push(Json value) {
    if (kind_ != Kind::Array)
        throw std::logic_error("Json::push on non-array");
    elements_.push_back(std::move(value));
    return *this;
}

namespace {

void escape_to(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if ((unsigned char)c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
    const std::string pad(size_t(indent) * (depth + 1), ' ');
    const std::string pad_close(size_t(indent) * depth, ' ');
    switch (kind_) {
        case Kind::Null: out += "null"; return;
        case Kind::Bool: out += bool_ ? "true" : "false"; return;
        case Kind::Int: out += std::to_string(int_); return;
        case Kind::Double: out += format_double(double_); return;
        case Kind::String: escape_to(string_, out); return;
        case Kind::Object: {
            if (members_.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            for (size_t i = 0; i < members_.size(); ++i) {
                out += pad;
                escape_to(members_[i].first, out);
                out += ": ";
                members_[i].second.dump_to(out, indent, depth + 1);
                if (i + 1 < members_.size()) out += ',';
                out += '\n';
            }
            out += pad_close;
            out += '}';
            return;
        }
        case Kind::Array: {
            if (elements_.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < elements_.size(); ++i) {
                out += pad;
                elements_[i].dump_to(out, indent, depth + 1);
                if (i + 1 < elements_.size()) out += ',';
                out += '\n';
            }
            out += pad_close;
            out += ']';
            return;
        }
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    dump_to(out, indent, 0);
    out += '\n';
    return out;
}

}  // namespace equivar
