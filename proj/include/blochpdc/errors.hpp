#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace blochpdc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "InvalidArgument"; }
};

class AbsorbingRegion : public Error {
public:
    AbsorbingRegion(double lambda_nm, double edge_nm)
        : Error("wavelength " + std::to_string(lambda_nm) + " nm is below the absorption edge at " +
                std::to_string(edge_nm) + " nm"),
          lambda(lambda_nm), edge(edge_nm) {}
    const char* kind() const noexcept override { return "AbsorbingRegion"; }
    double lambda;
    double edge;
};

class OutOfRange : public Error {
public:
    OutOfRange(double value, double lo, double hi)
        : Error("wavelength " + std::to_string(value) + " nm outside dispersion table [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "] nm"),
          value(value), lo(lo), hi(hi) {}
    const char* kind() const noexcept override { return "OutOfRange"; }
    double value, lo, hi;
};

class DegenerateMode : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "DegenerateMode"; }
};

class NoSolution : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "NoSolution"; }
};

class NoIntersection : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "NoIntersection"; }
};

class EmptySurface : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "EmptySurface"; }
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> v)
        : Error(join(v)), violations(std::move(v)) {}
    const char* kind() const noexcept override { return "ConfigError"; }
    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) {
            if (!s.empty()) s += "; ";
            s += x;
        }
        return s;
    }
};

}  // namespace blochpdc
