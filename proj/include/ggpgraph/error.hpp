// Copyright 2026 The ggpgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GGPGRAPH_ERROR_HPP
#define GGPGRAPH_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ggpgraph {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class domain_error : public error {
 public:
  using error::error;
};

/// (sigma, tau) outside the admissible GGP region.
class out_of_region : public domain_error {
 public:
  using domain_error::domain_error;
};

class non_positive_alpha : public domain_error {
 public:
  using domain_error::domain_error;
};

/// Requested tail value is above the total mass of a finite-activity measure.
class not_invertible : public domain_error {
 public:
  using domain_error::domain_error;
};

class degenerate_mass : public error {
 public:
  using error::error;
};

class overlap_error : public error {
 public:
  using error::error;
};

class inconsistent_state : public error {
 public:
  using error::error;
};

class too_few_chains : public error {
 public:
  using error::error;
};

class too_few_samples : public error {
 public:
  using error::error;
};

class empty_graph : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

class schema_error : public error {
 public:
  using error::error;
};

class parse_error : public error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ggpgraph

#endif  // GGPGRAPH_ERROR_HPP
