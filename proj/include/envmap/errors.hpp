#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace envmap {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class MalformedRecord : public ParseError {
public:
    MalformedRecord(std::size_t line_no, const std::string& detail)
        : ParseError("malformed record at line " + std::to_string(line_no) + ": " + detail),
          line_no(line_no) {}
    std::size_t line_no;
};

class MissingHeader : public ParseError {
public:
    explicit MissingHeader(const std::string& detail)
        : ParseError("missing or invalid header record: " + detail) {}
};

class DanglingSnapshotRef : public ParseError {
public:
    DanglingSnapshotRef(std::size_t event_index, const std::string& ref)
        : ParseError("event " + std::to_string(event_index) +
                     " references unknown snapshot '" + ref + "'"),
          event_index(event_index) {}
    std::size_t event_index;
};

class UnparseableUrl : public std::runtime_error {
public:
    explicit UnparseableUrl(const std::string& url)
        : std::runtime_error("unparseable url: '" + url + "'") {}
};

class SchemaViolation : public std::runtime_error {
public:
    SchemaViolation(const std::string& path, const std::string& field)
        : std::runtime_error("schema violation in " + path + ": " + field) {}
};

class DanglingMeshPath : public std::runtime_error {
public:
    DanglingMeshPath(const std::string& id, const std::string& path)
        : std::runtime_error("mesh path for " + id + " not found: " + path) {}
};

class InvalidMap : public std::runtime_error {
public:
    explicit InvalidMap(const std::vector<std::string>& violations)
        : std::runtime_error(join(violations)) {}

private:
    static std::string join(const std::vector<std::string>& vs) {
        std::string out = "invalid map:";
        for (const auto& v : vs) out += "\n  " + v;
        return out;
    }
};

class EnvironmentMismatch : public std::runtime_error {
public:
    EnvironmentMismatch(const std::string& a, const std::string& b)
        : std::runtime_error("cannot merge maps for different environments: '" + a +
                             "' vs '" + b + "'") {}
};

class UnknownContext : public std::runtime_error {
public:
    explicit UnknownContext(const std::string& context_id)
        : std::runtime_error("unknown context: '" + context_id + "'") {}
};

class MalformedHar : public std::runtime_error {
public:
    explicit MalformedHar(const std::string& detail)
        : std::runtime_error("malformed HAR: " + detail) {}
};

class ProviderUnavailable : public std::runtime_error {
public:
    explicit ProviderUnavailable(const std::string& detail)
        : std::runtime_error("annotation provider unavailable: " + detail) {}
};

// A detected invariant breach, reported as data rather than thrown.
struct Violation {
    std::string code;
    std::string detail;
};

}  // namespace envmap
