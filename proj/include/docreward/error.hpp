// Copyright 2026 The docreward Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace docreward {

// Base for every error the library raises. Callers that only care about
// "bad input vs. bug" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTags : public Error {
 public:
  using Error::Error;
};

class MatchDocumentMismatch : public Error {
 public:
  using Error::Error;
};

class DuplicateElements : public Error {
 public:
  using Error::Error;
};

class EmptyGroup : public Error {
 public:
  using Error::Error;
};

class NoTableFound : public Error {
 public:
  using Error::Error;
};

class DepthLimitExceeded : public Error {
 public:
  using Error::Error;
};

class UnknownAttributeKey : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class SlotKindMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientContent : public Error {
 public:
  using Error::Error;
};

class UnrecognizedStructure : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace docreward
