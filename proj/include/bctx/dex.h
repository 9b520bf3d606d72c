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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bctx/bytes.h"

namespace bctx::dex {

inline constexpr std::uint32_t kNoIndex = 0xffffffff;
inline constexpr std::size_t kHeaderSize = 0x70;

inline constexpr std::uint32_t kAccStatic = 0x0008;
inline constexpr std::uint32_t kAccPrivate = 0x0002;
inline constexpr std::uint32_t kAccPublic = 0x0001;
inline constexpr std::uint32_t kAccNative = 0x0100;
inline constexpr std::uint32_t kAccInterface = 0x0200;
inline constexpr std::uint32_t kAccAbstract = 0x0400;
inline constexpr std::uint32_t kAccConstructor = 0x10000;

struct SectionRef {
  std::uint32_t size = 0;
  std::uint32_t offset = 0;
};

struct DexHeader {
  std::array<std::uint8_t, 8> magic{};
  std::uint32_t checksum = 0;
  std::array<std::uint8_t, 20> signature{};
  std::uint32_t file_size = 0;
  std::uint32_t header_size = 0;
  std::uint32_t endian_tag = 0;
  SectionRef link, string_ids, type_ids, proto_ids, field_ids, method_ids, class_defs, data;
  std::uint32_t map_off = 0;
};

struct MethodRef {
  std::string defining_type;  // "Lcom/foo/Bar;"
  std::string name;
  std::string descriptor;     // "(ILjava/lang/String;)V"

  // "Lcom/foo/Bar;->name(I)V"
  std::string Signature() const { return defining_type + "->" + name + descriptor; }
  friend bool operator==(const MethodRef&, const MethodRef&) = default;
  friend auto operator<=>(const MethodRef&, const MethodRef&) = default;
};

enum class InvokeStyle : std::uint8_t { kVirtual, kSuper, kDirect, kStatic, kInterface };

enum class InsnKind : std::uint8_t { kConstString, kInvoke, kConstClass, kOther };

struct DecodedInstruction {
  std::uint32_t offset = 0;  // code-unit index within the code item
  std::uint32_t length = 0;  // in code units
  std::uint8_t opcode = 0;
  InsnKind kind = InsnKind::kOther;
  // string index (ConstString), method index (Invoke) or type index (ConstClass).
  std::uint32_t index = 0;
  InvokeStyle invoke_style = InvokeStyle::kVirtual;
  bool range = false;
  // Switch and array-data payloads are reported as kOther with this flag set;
  // `index` then holds the entry count and payload_ident the first code unit.
  bool payload = false;
  std::uint16_t payload_ident = 0;
  std::uint16_t element_width = 0;  // fill-array-data only
};

struct CodeItem {
  std::uint16_t registers_size = 0;
  std::uint16_t ins_size = 0;
  std::uint16_t outs_size = 0;
  std::uint16_t tries_size = 0;
  std::uint32_t insns_size = 0;  // code units
  std::vector<DecodedInstruction> insns;
};

struct EncodedMethod {
  std::uint32_t method_index = 0;
  MethodRef ref;
  std::uint32_t access_flags = 0;
  bool direct = false;
  std::optional<CodeItem> code;  // none for abstract or native methods
};

struct ClassDef {
  std::string this_type;
  std::optional<std::string> superclass_type;
  std::vector<std::string> interfaces;
  std::uint32_t access_flags = 0;
  // Direct methods first, then virtual methods, each in method-index order.
  std::vector<EncodedMethod> methods;
};

struct ProtoId {
  std::string shorty;
  std::string return_type;
  std::vector<std::string> parameters;
  std::string Descriptor() const;
};

struct FieldRef {
  std::string defining_type;
  std::string type;
  std::string name;
};

// Parsed view of one classes.dex. Immutable after ParseDex.
class DexFile {
 public:
  const DexHeader& header() const { return header_; }
  bool checksum_ok() const { return checksum_ok_; }
  bool signature_ok() const { return signature_ok_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::size_t string_count() const { return strings_.size(); }
  // Decoded text of a string id. Items that failed MUTF-8 decoding are empty
  // and flagged by string_ok().
  const std::string& string_at(std::uint32_t idx) const;
  bool string_ok(std::uint32_t idx) const { return string_ok_.at(idx); }

  const std::vector<std::string>& types() const { return types_; }
  const std::vector<ProtoId>& protos() const { return protos_; }
  const std::vector<FieldRef>& fields() const { return fields_; }
  const std::vector<MethodRef>& methods() const { return methods_; }
  const std::vector<ClassDef>& classes() const { return classes_; }

  const std::string& type_at(std::uint32_t idx) const;
  const MethodRef& method_at(std::uint32_t idx) const;

 private:
  friend DexFile ParseDex(ByteView bytes);

  DexHeader header_;
  bool checksum_ok_ = true;
  bool signature_ok_ = true;
  std::vector<std::string> warnings_;
  std::vector<std::string> strings_;
  std::vector<bool> string_ok_;
  std::vector<std::string> types_;
  std::vector<ProtoId> protos_;
  std::vector<FieldRef> fields_;
  std::vector<MethodRef> methods_;
  std::vector<ClassDef> classes_;
};

// Throws BadMagic, TruncatedSection or IndexOutOfRange. A checksum mismatch
// is recorded (checksum_ok() == false) and parsing continues.
DexFile ParseDex(ByteView bytes);

// (index, text) for every string id that decoded cleanly, in index order.
std::vector<std::pair<std::uint32_t, std::string>> IterStrings(const DexFile& dex);

// Decodes one MUTF-8 string. Returns nullopt on malformed input; when
// utf16_units is supplied the decoded UTF-16 length must match it.
std::optional<std::string> DecodeMutf8(ByteView data,
                                       std::optional<std::uint32_t> utf16_units = std::nullopt);
// Standard UTF-8 text to MUTF-8 bytes (without terminator) plus its UTF-16 length.
std::pair<Bytes, std::uint32_t> EncodeMutf8(std::string_view utf8);

// Width in code units of a non-payload instruction with this opcode.
std::uint32_t OpcodeWidth(std::uint8_t opcode);

// Walks an instruction array; throws TruncatedSection if the last instruction
// overruns it.
std::vector<DecodedInstruction> DecodeInstructions(std::span<const std::uint16_t> insns);

}  // namespace bctx::dex
