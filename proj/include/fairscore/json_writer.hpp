#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace fairscore {

/// Doubles formatted with 17 significant digits (round-trip exact), the
/// serialization used by every CSV and JSON artifact the library emits.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Minimal streaming JSON emitter. Key order is insertion order and numbers
/// go through fmt_g17, so identical inputs produce byte-identical documents.
class JsonWriter {
public:
    std::string take() && { return std::move(out_); }
    const std::string& str() const { return out_; }

    JsonWriter& begin_object() {
        separate();
        out_ += '{';
        stack_.push_back(false);
        return *this;
    }
    JsonWriter& end_object() {
        out_ += '}';
        stack_.pop_back();
        mark_value();
        return *this;
    }
    JsonWriter& begin_array() {
        separate();
        out_ += '[';
        stack_.push_back(false);
        return *this;
    }
    JsonWriter& end_array() {
        out_ += ']';
        stack_.pop_back();
        mark_value();
        return *this;
    }
    JsonWriter& key(const std::string& name) {
        separate();
        escape(name);
        out_ += ':';
        pending_key_ = true;
        return *this;
    }
    JsonWriter& value(double x) { return raw(fmt_g17(x)); }
    JsonWriter& value(long long x) { return raw(std::to_string(x)); }
    JsonWriter& value(int x) { return raw(std::to_string(x)); }
    JsonWriter& value(unsigned long long x) { return raw(std::to_string(x)); }
    JsonWriter& value(bool b) { return raw(b ? "true" : "false"); }
    JsonWriter& value(const std::string& s) {
        separate();
        escape(s);
        mark_value();
        return *this;
    }
    JsonWriter& value(const char* s) { return value(std::string(s)); }

private:
    JsonWriter& raw(const std::string& text) {
        separate();
        out_ += text;
        mark_value();
        return *this;
    }
    void separate() {
        if (pending_key_) {
            pending_key_ = false;
            return;
        }
        if (!stack_.empty() && stack_.back()) out_ += ',';
    }
    void mark_value() {
        if (!stack_.empty()) stack_.back() = true;
    }
    void escape(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\r': out_ += "\\r"; break;
                case '\t': out_ += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<bool> stack_;
    bool pending_key_ = false;
};

}  // namespace fairscore
