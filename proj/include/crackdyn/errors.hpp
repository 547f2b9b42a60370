#pragma once

#include <stdexcept>
#include <string>

namespace crackdyn {

// Raised for malformed or inconsistent configuration input. `path` points at
// the offending JSON location, e.g. "/physical/cracks[1]/depth_ratio".
class config_error : public std::runtime_error {
public:
    config_error(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Raised when a numerical procedure fails to deliver (root search exhausted,
// eigensolve breakdown, time integration blow-up).
class numerical_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace crackdyn
