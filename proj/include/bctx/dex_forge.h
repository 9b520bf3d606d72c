// Copyright 2026 The bctx Authors
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

#include <optional>
#include <string>
#include <vector>

#include "bctx/dex.h"

namespace bctx::dex {

// One instruction of a forged method body. Only the fields relevant to `op`
// are meaningful; the factories leave the rest at their defaults so specs
// compare with ==.
struct ForgeInsn {
  enum class Op : std::uint8_t {
    kConstString,
    kConstClass,
    kInvoke,
    kReturnVoid,
    kNop,
    kOpaque,  // any other opcode, operands zeroed
    kPackedSwitchPayload,
    kSparseSwitchPayload,
    kFillArrayDataPayload,
  };

  Op op = Op::kNop;
  std::string text;  // string literal (kConstString) or type descriptor (kConstClass)
  MethodRef target;
  InvokeStyle style = InvokeStyle::kVirtual;
  bool range = false;
  std::uint8_t opcode = 0;
  std::uint32_t count = 0;          // payload entries
  std::uint16_t element_width = 0;  // fill-array-data

  static ForgeInsn ConstString(std::string text);
  static ForgeInsn ConstClass(std::string type);
  static ForgeInsn Invoke(InvokeStyle style, MethodRef target, bool range = false);
  static ForgeInsn ReturnVoid();
  static ForgeInsn Opaque(std::uint8_t opcode);
  static ForgeInsn PackedSwitch(std::uint32_t targets);
  static ForgeInsn SparseSwitch(std::uint32_t entries);
  static ForgeInsn FillArrayData(std::uint16_t element_width, std::uint32_t elements);

  friend bool operator==(const ForgeInsn&, const ForgeInsn&) = default;
};

struct ForgeMethod {
  std::string name;
  std::string descriptor = "()V";
  std::uint32_t access_flags = kAccPublic;
  // Abstract and native methods carry no code item.
  bool has_code = true;
  std::vector<ForgeInsn> code;

  // Static, private and constructor methods live in the direct list.
  bool IsDirect() const;
  friend bool operator==(const ForgeMethod&, const ForgeMethod&) = default;
};

struct ForgeClass {
  std::string type;
  std::optional<std::string> superclass = "Ljava/lang/Object;";
  std::vector<std::string> interfaces;
  std::uint32_t access_flags = kAccPublic;
  std::vector<ForgeMethod> methods;
  friend bool operator==(const ForgeClass&, const ForgeClass&) = default;
};

struct DexSpec {
  // Extra pool strings beyond those implied by classes and code.
  std::vector<std::string> strings;
  std::vector<ForgeClass> classes;
};

// Emits a version 035 DEX with valid checksum and signature. Throws
// SpecTooLarge when indices or offsets overflow their fields and BadConfig for
// malformed descriptors.
Bytes ForgeDex(const DexSpec& spec);

// Inverse view of a parsed file: every pool string, and classes with methods
// in parsed order (direct then virtual, by method index).
DexSpec DescribeDex(const DexFile& dex);

// Splits "(IJLfoo;)V" into parameter types and the return type; nullopt if
// malformed.
struct ParsedDescriptor {
  std::vector<std::string> parameters;
  std::string return_type;
};
std::optional<ParsedDescriptor> ParseMethodDescriptor(std::string_view descriptor);
bool IsValidTypeDescriptor(std::string_view type, bool allow_void = true);

}  // namespace bctx::dex
