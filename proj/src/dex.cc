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

#include "bctx/dex.h"

#include <algorithm>
#include <cstring>
#include <unordered_set>

#include "bctx/digest.h"

namespace bctx::dex {
namespace {

constexpr std::uint8_t kDexMagicPrefix[4] = {'d', 'e', 'x', '\n'};
constexpr std::uint32_t kEndianConstant = 0x12345678;

constexpr std::uint16_t kPackedSwitchPayload = 0x0100;
constexpr std::uint16_t kSparseSwitchPayload = 0x0200;
constexpr std::uint16_t kFillArrayDataPayload = 0x0300;

// Instruction widths in 16-bit code units, indexed by opcode.
constexpr std::array<std::uint8_t, 256> kWidths = [] {
  std::array<std::uint8_t, 256> w{};
  auto set = [&w](int lo, int hi, std::uint8_t width) {
    for (int op = lo; op <= hi; ++op) w[op] = width;
  };
  set(0x00, 0x01, 1);  // nop, move
  set(0x02, 0x02, 2);  // move/from16
  set(0x03, 0x03, 3);  // move/16
  set(0x04, 0x04, 1);
  set(0x05, 0x05, 2);
  set(0x06, 0x06, 3);
  set(0x07, 0x07, 1);
  set(0x08, 0x08, 2);
  set(0x09, 0x09, 3);
  set(0x0a, 0x12, 1);  // move-result .. const/4
  set(0x13, 0x13, 2);  // const/16
  set(0x14, 0x14, 3);  // const
  set(0x15, 0x16, 2);  // const/high16, const-wide/16
  set(0x17, 0x17, 3);  // const-wide/32
  set(0x18, 0x18, 5);  // const-wide
  set(0x19, 0x19, 2);  // const-wide/high16
  set(0x1a, 0x1a, 2);  // const-string
  set(0x1b, 0x1b, 3);  // const-string/jumbo
  set(0x1c, 0x1c, 2);  // const-class
  set(0x1d, 0x1e, 1);  // monitor-enter/exit
  set(0x1f, 0x20, 2);  // check-cast, instance-of
  set(0x21, 0x21, 1);  // array-length
  set(0x22, 0x23, 2);  // new-instance, new-array
  set(0x24, 0x26, 3);  // filled-new-array(/range), fill-array-data
  set(0x27, 0x28, 1);  // throw, goto
  set(0x29, 0x29, 2);  // goto/16
  set(0x2a, 0x2c, 3);  // goto/32, packed-switch, sparse-switch
  set(0x2d, 0x3d, 2);  // cmp*, if-*
  set(0x3e, 0x43, 1);  // unused
  set(0x44, 0x6d, 2);  // aget/aput/iget/iput/sget/sput
  set(0x6e, 0x72, 3);  // invoke-*
  set(0x73, 0x73, 1);  // unused
  set(0x74, 0x78, 3);  // invoke-*/range
  set(0x79, 0x7a, 1);  // unused
  set(0x7b, 0x8f, 1);  // unops
  set(0x90, 0xaf, 2);  // binops
  set(0xb0, 0xcf, 1);  // binop/2addr
  set(0xd0, 0xe2, 2);  // binop/lit16, binop/lit8
  set(0xe3, 0xf9, 1);  // unused
  set(0xfa, 0xfb, 4);  // invoke-polymorphic(/range)
  set(0xfc, 0xfd, 3);  // invoke-custom(/range)
  set(0xfe, 0xff, 2);  // const-method-handle, const-method-type
  return w;
}();

InvokeStyle StyleFor(std::uint8_t base) {
  switch (base) {
    case 0x6e: return InvokeStyle::kVirtual;
    case 0x6f: return InvokeStyle::kSuper;
    case 0x70: return InvokeStyle::kDirect;
    case 0x71: return InvokeStyle::kStatic;
    default: return InvokeStyle::kInterface;
  }
}

std::string OffsetMsg(const char* what, std::uint32_t off) {
  return std::string(what) + " at offset " + std::to_string(off);
}

}  // namespace

std::uint32_t OpcodeWidth(std::uint8_t opcode) { return kWidths[opcode]; }

std::vector<DecodedInstruction> DecodeInstructions(std::span<const std::uint16_t> insns) {
  std::vector<DecodedInstruction> out;
  std::size_t pc = 0;
  auto unit = [&](std::size_t i) -> std::uint32_t {
    if (i >= insns.size()) {
      throw Error(ErrorCode::kTruncatedSection,
                  "instruction at " + std::to_string(pc) + " overruns code item");
    }
    return insns[i];
  };
  while (pc < insns.size()) {
    DecodedInstruction d;
    d.offset = static_cast<std::uint32_t>(pc);
    const std::uint16_t first = insns[pc];
    d.opcode = static_cast<std::uint8_t>(first & 0xff);

    if (first == kPackedSwitchPayload || first == kSparseSwitchPayload ||
        first == kFillArrayDataPayload) {
      d.payload = true;
      d.payload_ident = first;
    }
    if (first == kPackedSwitchPayload) {
      d.index = unit(pc + 1);
      d.length = d.index * 2 + 4;
    } else if (first == kSparseSwitchPayload) {
      d.index = unit(pc + 1);
      d.length = d.index * 4 + 2;
    } else if (first == kFillArrayDataPayload) {
      const std::uint64_t width = unit(pc + 1);
      const std::uint64_t count = unit(pc + 2) | (unit(pc + 3) << 16);
      d.element_width = static_cast<std::uint16_t>(width);
      d.index = static_cast<std::uint32_t>(count);
      const std::uint64_t units = (width * count + 1) / 2 + 4;
      if (units > insns.size()) {
        throw Error(ErrorCode::kTruncatedSection, "fill-array-data payload overruns code item");
      }
      d.length = static_cast<std::uint32_t>(units);
    } else {
      d.length = kWidths[d.opcode];
      switch (d.opcode) {
        case 0x1a:
          d.kind = InsnKind::kConstString;
          d.index = unit(pc + 1);
          break;
        case 0x1b:
          d.kind = InsnKind::kConstString;
          d.index = unit(pc + 1) | (unit(pc + 2) << 16);
          break;
        case 0x1c:
          d.kind = InsnKind::kConstClass;
          d.index = unit(pc + 1);
          break;
        default:
          if (d.opcode >= 0x6e && d.opcode <= 0x72) {
            d.kind = InsnKind::kInvoke;
            d.invoke_style = StyleFor(d.opcode);
            d.index = unit(pc + 1);
          } else if (d.opcode >= 0x74 && d.opcode <= 0x78) {
            d.kind = InsnKind::kInvoke;
            d.invoke_style = StyleFor(static_cast<std::uint8_t>(d.opcode - 6));
            d.range = true;
            d.index = unit(pc + 1);
          }
      }
    }
    if (pc + d.length > insns.size()) {
      throw Error(ErrorCode::kTruncatedSection,
                  "instruction at " + std::to_string(pc) + " overruns code item");
    }
    pc += d.length;
    out.push_back(d);
  }
  return out;
}

std::optional<std::string> DecodeMutf8(ByteView data, std::optional<std::uint32_t> utf16_units) {
  std::string out;
  out.reserve(data.size());
  std::uint32_t units = 0;
  std::uint32_t pending_high = 0;  // unmatched high surrogate

  auto emit = [&out](std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  };
  auto flush_high = [&] {
    // Lone surrogates are kept as their 3-byte form, as the runtime does.
    if (pending_high != 0) emit(pending_high);
    pending_high = 0;
  };

  std::size_t i = 0;
  while (i < data.size()) {
    const std::uint8_t b0 = data[i];
    std::uint32_t unit;
    if (b0 == 0) {
      return std::nullopt;  // raw NUL is never valid inside MUTF-8
    } else if (b0 < 0x80) {
      unit = b0;
      i += 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      if (i + 1 >= data.size() || (data[i + 1] & 0xc0) != 0x80) return std::nullopt;
      unit = ((b0 & 0x1fu) << 6) | (data[i + 1] & 0x3fu);
      if (unit < 0x80 && unit != 0) return std::nullopt;  // overlong, except encoded NUL
      i += 2;
    } else if ((b0 & 0xf0) == 0xe0) {
      if (i + 2 >= data.size() || (data[i + 1] & 0xc0) != 0x80 || (data[i + 2] & 0xc0) != 0x80) {
        return std::nullopt;
      }
      unit = ((b0 & 0x0fu) << 12) | ((data[i + 1] & 0x3fu) << 6) | (data[i + 2] & 0x3fu);
      if (unit < 0x800) return std::nullopt;
      i += 3;
    } else {
      return std::nullopt;  // 4-byte forms do not exist in MUTF-8
    }
    ++units;

    if (unit >= 0xd800 && unit <= 0xdbff) {
      flush_high();
      pending_high = unit;
    } else if (unit >= 0xdc00 && unit <= 0xdfff && pending_high != 0) {
      emit(0x10000 + ((pending_high - 0xd800) << 10) + (unit - 0xdc00));
      pending_high = 0;
    } else {
      flush_high();
      emit(unit);
    }
  }
  flush_high();
  if (utf16_units && *utf16_units != units) return std::nullopt;
  return out;
}

std::pair<Bytes, std::uint32_t> EncodeMutf8(std::string_view utf8) {
  Bytes out;
  std::uint32_t units = 0;
  auto put_unit = [&](std::uint32_t u) {
    ++units;
    if (u != 0 && u < 0x80) {
      out.push_back(static_cast<std::uint8_t>(u));
    } else if (u < 0x800) {
      out.push_back(static_cast<std::uint8_t>(0xc0 | (u >> 6)));
      out.push_back(static_cast<std::uint8_t>(0x80 | (u & 0x3f)));
    } else {
      out.push_back(static_cast<std::uint8_t>(0xe0 | (u >> 12)));
      out.push_back(static_cast<std::uint8_t>(0x80 | ((u >> 6) & 0x3f)));
      out.push_back(static_cast<std::uint8_t>(0x80 | (u & 0x3f)));
    }
  };
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto b0 = static_cast<std::uint8_t>(utf8[i]);
    std::uint32_t cp;
    std::size_t len;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      cp = b0 & 0x1f;
      len = 2;
    } else if ((b0 & 0xf0) == 0xe0) {
      cp = b0 & 0x0f;
      len = 3;
    } else {
      cp = b0 & 0x07;
      len = 4;
    }
    for (std::size_t k = 1; k < len && i + k < utf8.size(); ++k) {
      cp = (cp << 6) | (static_cast<std::uint8_t>(utf8[i + k]) & 0x3f);
    }
    i += len;
    if (cp >= 0x10000) {
      cp -= 0x10000;
      put_unit(0xd800 + (cp >> 10));
      put_unit(0xdc00 + (cp & 0x3ff));
    } else {
      put_unit(cp);
    }
  }
  return {std::move(out), units};
}

std::string ProtoId::Descriptor() const {
  std::string d = "(";
  for (const auto& p : parameters) d += p;
  d += ")";
  d += return_type;
  return d;
}

const std::string& DexFile::string_at(std::uint32_t idx) const {
  if (idx >= strings_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "string index " + std::to_string(idx));
  }
  return strings_[idx];
}

const std::string& DexFile::type_at(std::uint32_t idx) const {
  if (idx >= types_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "type index " + std::to_string(idx));
  }
  return types_[idx];
}

const MethodRef& DexFile::method_at(std::uint32_t idx) const {
  if (idx >= methods_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "method index " + std::to_string(idx));
  }
  return methods_[idx];
}

DexFile ParseDex(ByteView bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::kBadMagic, "input is " + std::to_string(bytes.size()) +
                                          " bytes, smaller than a DEX header");
  }
  if (std::memcmp(bytes.data(), kDexMagicPrefix, 4) != 0 || bytes[7] != 0) {
    throw Error(ErrorCode::kBadMagic, "missing dex\\n magic");
  }

  DexFile dex;
  DexHeader& h = dex.header_;
  ByteReader r(bytes);
  std::copy_n(r.Take(8).begin(), 8, h.magic.begin());
  h.checksum = r.U32();
  std::copy_n(r.Take(20).begin(), 20, h.signature.begin());
  h.file_size = r.U32();
  h.header_size = r.U32();
  h.endian_tag = r.U32();
  auto section = [&r] {
    SectionRef s;
    s.size = r.U32();
    s.offset = r.U32();
    return s;
  };
  h.link = section();
  h.map_off = r.U32();
  h.string_ids = section();
  h.type_ids = section();
  h.proto_ids = section();
  h.field_ids = section();
  h.method_ids = section();
  h.class_defs = section();
  h.data = section();

  if (h.endian_tag != kEndianConstant) {
    throw Error(ErrorCode::kBadMagic, "unsupported endian tag");
  }
  if (h.file_size != bytes.size()) {
    throw Error(ErrorCode::kTruncatedSection,
                "header file_size " + std::to_string(h.file_size) + " but input has " +
                    std::to_string(bytes.size()) + " bytes");
  }

  if (Adler32(bytes.subspan(12)) != h.checksum) {
    dex.checksum_ok_ = false;
    dex.warnings_.push_back("ChecksumMismatch: stored Adler-32 does not match contents");
  }
  if (Sha1(bytes.subspan(32)) != h.signature) {
    dex.signature_ok_ = false;
    dex.warnings_.push_back("signature does not match SHA-1 of contents");
  }

  auto table = [&](const SectionRef& s, std::size_t item_size, const char* name) {
    const std::uint64_t end = static_cast<std::uint64_t>(s.offset) + std::uint64_t{s.size} * item_size;
    if (s.size != 0 && (s.offset >= bytes.size() || end > bytes.size())) {
      throw Error(ErrorCode::kTruncatedSection, std::string(name) + " table outside file");
    }
  };
  table(h.string_ids, 4, "string_ids");
  table(h.type_ids, 4, "type_ids");
  table(h.proto_ids, 12, "proto_ids");
  table(h.field_ids, 8, "field_ids");
  table(h.method_ids, 8, "method_ids");
  table(h.class_defs, 32, "class_defs");

  // Strings.
  dex.strings_.resize(h.string_ids.size);
  dex.string_ok_.assign(h.string_ids.size, true);
  for (std::uint32_t i = 0; i < h.string_ids.size; ++i) {
    const std::uint32_t data_off = LoadU32(bytes, h.string_ids.offset + 4 * i);
    ByteReader sr(bytes);
    sr.Seek(data_off);
    const std::uint32_t units = sr.Uleb128();
    const auto rest = bytes.subspan(sr.pos());
    const auto nul = std::find(rest.begin(), rest.end(), std::uint8_t{0});
    if (nul == rest.end()) {
      throw Error(ErrorCode::kTruncatedSection, OffsetMsg("unterminated string_data", data_off));
    }
    auto decoded = DecodeMutf8(rest.subspan(0, static_cast<std::size_t>(nul - rest.begin())), units);
    if (decoded) {
      dex.strings_[i] = std::move(*decoded);
    } else {
      dex.string_ok_[i] = false;
      dex.warnings_.push_back("BadMutf8: string " + std::to_string(i));
    }
  }

  auto string_ref = [&](std::uint32_t idx) -> const std::string& { return dex.string_at(idx); };

  dex.types_.reserve(h.type_ids.size);
  for (std::uint32_t i = 0; i < h.type_ids.size; ++i) {
    dex.types_.push_back(string_ref(LoadU32(bytes, h.type_ids.offset + 4 * i)));
  }

  auto type_list = [&](std::uint32_t off) {
    std::vector<std::string> out;
    if (off == 0) return out;
    ByteReader tr(bytes);
    tr.Seek(off);
    const std::uint32_t n = tr.U32();
    if (std::uint64_t{n} * 2 > tr.remaining()) {
      throw Error(ErrorCode::kTruncatedSection, OffsetMsg("type_list", off));
    }
    for (std::uint32_t k = 0; k < n; ++k) out.push_back(dex.type_at(tr.U16()));
    return out;
  };

  dex.protos_.reserve(h.proto_ids.size);
  for (std::uint32_t i = 0; i < h.proto_ids.size; ++i) {
    const std::size_t base = h.proto_ids.offset + 12 * i;
    ProtoId p;
    p.shorty = string_ref(LoadU32(bytes, base));
    p.return_type = dex.type_at(LoadU32(bytes, base + 4));
    p.parameters = type_list(LoadU32(bytes, base + 8));
    dex.protos_.push_back(std::move(p));
  }

  dex.fields_.reserve(h.field_ids.size);
  for (std::uint32_t i = 0; i < h.field_ids.size; ++i) {
    const std::size_t base = h.field_ids.offset + 8 * i;
    dex.fields_.push_back(FieldRef{dex.type_at(LoadU16(bytes, base)),
                                   dex.type_at(LoadU16(bytes, base + 2)),
                                   string_ref(LoadU32(bytes, base + 4))});
  }

  dex.methods_.reserve(h.method_ids.size);
  for (std::uint32_t i = 0; i < h.method_ids.size; ++i) {
    const std::size_t base = h.method_ids.offset + 8 * i;
    const std::uint16_t proto = LoadU16(bytes, base + 2);
    if (proto >= dex.protos_.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "proto index " + std::to_string(proto));
    }
    dex.methods_.push_back(MethodRef{dex.type_at(LoadU16(bytes, base)),
                                     string_ref(LoadU32(bytes, base + 4)),
                                     dex.protos_[proto].Descriptor()});
  }

  auto read_code = [&](std::uint32_t off) {
    ByteReader cr(bytes);
    cr.Seek(off);
    CodeItem code;
    code.registers_size = cr.U16();
    code.ins_size = cr.U16();
    code.outs_size = cr.U16();
    code.tries_size = cr.U16();
    cr.U32();  // debug_info_off
    code.insns_size = cr.U32();
    if (std::uint64_t{code.insns_size} * 2 > cr.remaining()) {
      throw Error(ErrorCode::kTruncatedSection, OffsetMsg("code item insns", off));
    }
    std::vector<std::uint16_t> units(code.insns_size);
    for (auto& u : units) u = cr.U16();
    code.insns = DecodeInstructions(units);
    for (const auto& insn : code.insns) {
      const std::size_t limit = insn.kind == InsnKind::kConstString ? dex.strings_.size()
                                : insn.kind == InsnKind::kInvoke    ? dex.methods_.size()
                                : insn.kind == InsnKind::kConstClass ? dex.types_.size()
                                                                     : SIZE_MAX;
      if (insn.index >= limit) {
        throw Error(ErrorCode::kIndexOutOfRange,
                    "operand " + std::to_string(insn.index) + " at code unit " +
                        std::to_string(insn.offset) + " of code item " + std::to_string(off));
      }
    }
    return code;
  };

  dex.classes_.reserve(h.class_defs.size);
  for (std::uint32_t i = 0; i < h.class_defs.size; ++i) {
    const std::size_t base = h.class_defs.offset + 32 * i;
    ClassDef cls;
    cls.this_type = dex.type_at(LoadU32(bytes, base));
    cls.access_flags = LoadU32(bytes, base + 4);
    const std::uint32_t super_idx = LoadU32(bytes, base + 8);
    if (super_idx != kNoIndex) cls.superclass_type = dex.type_at(super_idx);
    cls.interfaces = type_list(LoadU32(bytes, base + 12));
    const std::uint32_t class_data_off = LoadU32(bytes, base + 24);
    if (class_data_off != 0) {
      ByteReader cr(bytes);
      cr.Seek(class_data_off);
      const std::uint32_t static_fields = cr.Uleb128();
      const std::uint32_t instance_fields = cr.Uleb128();
      const std::uint32_t direct_methods = cr.Uleb128();
      const std::uint32_t virtual_methods = cr.Uleb128();
      for (std::uint64_t f = 0; f < std::uint64_t{static_fields} + instance_fields; ++f) {
        cr.Uleb128();
        cr.Uleb128();
      }
      auto read_methods = [&](std::uint32_t count, bool direct) {
        std::uint32_t idx = 0;
        for (std::uint32_t m = 0; m < count; ++m) {
          idx += cr.Uleb128();
          EncodedMethod em;
          em.method_index = idx;
          em.ref = dex.method_at(idx);
          em.access_flags = cr.Uleb128();
          em.direct = direct;
          const std::uint32_t code_off = cr.Uleb128();
          if (code_off != 0) em.code = read_code(code_off);
          cls.methods.push_back(std::move(em));
        }
      };
      read_methods(direct_methods, true);
      read_methods(virtual_methods, false);
    }
    dex.classes_.push_back(std::move(cls));
  }

  std::unordered_set<std::string_view> seen;
  for (const auto& cls : dex.classes_) {
    if (!seen.insert(cls.this_type).second) {
      dex.warnings_.push_back("duplicate class definition " + cls.this_type);
    }
  }
  return dex;
}

std::vector<std::pair<std::uint32_t, std::string>> IterStrings(const DexFile& dex) {
  std::vector<std::pair<std::uint32_t, std::string>> out;
  out.reserve(dex.string_count());
  for (std::uint32_t i = 0; i < dex.string_count(); ++i) {
    if (dex.string_ok(i)) out.emplace_back(i, dex.string_at(i));
  }
  return out;
}

}  // namespace bctx::dex
