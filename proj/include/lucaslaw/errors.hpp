#pragma once

#include <stdexcept>
#include <string>

namespace lucaslaw {

// Error taxonomy shared by the library and the CLI.  Each class maps to one
// process exit status:
//   hypothesis_error -> 2  (a stated precondition of the operation is violated)
//   resource_error   -> 3  (a configured evaluation cap was exceeded)
//   io_error         -> 4  (record or checkpoint persistence failed)

class hypothesis_error : public std::domain_error {
public:
    explicit hypothesis_error(const std::string& what) : std::domain_error(what) {}
};

class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lucaslaw
