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

#include "bctx/dex_forge.h"

#include <algorithm>
#include <map>
#include <set>

#include "bctx/digest.h"

namespace bctx::dex {
namespace {

std::u16string ToUtf16(std::string_view utf8) {
  auto [bytes, units] = EncodeMutf8(utf8);
  // Re-read the MUTF-8 units; every unit is 1-3 bytes.
  std::u16string out;
  out.reserve(units);
  for (std::size_t i = 0; i < bytes.size();) {
    const std::uint8_t b0 = bytes[i];
    if (b0 < 0x80) {
      out.push_back(b0);
      i += 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      out.push_back(static_cast<char16_t>(((b0 & 0x1f) << 6) | (bytes[i + 1] & 0x3f)));
      i += 2;
    } else {
      out.push_back(static_cast<char16_t>(((b0 & 0x0f) << 12) | ((bytes[i + 1] & 0x3f) << 6) |
                                          (bytes[i + 2] & 0x3f)));
      i += 3;
    }
  }
  return out;
}

// String ids must be sorted by UTF-16 code unit values.
struct Utf16Less {
  bool operator()(const std::string& a, const std::string& b) const {
    return ToUtf16(a) < ToUtf16(b);
  }
};

char ShortyChar(std::string_view type) {
  return (type[0] == 'L' || type[0] == '[') ? 'L' : type[0];
}

std::uint32_t ArgWords(const ParsedDescriptor& d, bool is_static) {
  std::uint32_t words = is_static ? 0 : 1;
  for (const auto& p : d.parameters) words += (p == "J" || p == "D") ? 2 : 1;
  return words;
}

ParsedDescriptor RequireDescriptor(std::string_view descriptor) {
  auto d = ParseMethodDescriptor(descriptor);
  if (!d) throw Error(ErrorCode::kBadConfig, "malformed method descriptor " + std::string(descriptor));
  return *d;
}

void RequireType(std::string_view type) {
  if (!IsValidTypeDescriptor(type, false)) {
    throw Error(ErrorCode::kBadConfig, "malformed type descriptor " + std::string(type));
  }
}

}  // namespace

bool IsValidTypeDescriptor(std::string_view type, bool allow_void) {
  std::size_t i = 0;
  while (i < type.size() && type[i] == '[') ++i;
  if (i > 255 || i == type.size()) return false;
  const bool array = i > 0;
  const char c = type[i];
  if (std::string_view("ZBSCIJFD").find(c) != std::string_view::npos) return i + 1 == type.size();
  if (c == 'V') return !array && allow_void && type.size() == 1;
  if (c != 'L' || type.back() != ';' || type.size() - i < 3) return false;
  for (std::size_t k = i + 1; k + 1 < type.size(); ++k) {
    const char ch = type[k];
    if (ch == ';' || ch == '.' || ch == '[' || ch == ' ') return false;
    if (ch == '/' && (k == i + 1 || type[k - 1] == '/' || k + 2 == type.size())) return false;
  }
  return true;
}

std::optional<ParsedDescriptor> ParseMethodDescriptor(std::string_view descriptor) {
  if (descriptor.size() < 3 || descriptor[0] != '(') return std::nullopt;
  const auto close = descriptor.find(')');
  if (close == std::string_view::npos) return std::nullopt;
  ParsedDescriptor out;
  std::size_t i = 1;
  while (i < close) {
    std::size_t j = i;
    while (j < close && descriptor[j] == '[') ++j;
    if (j >= close) return std::nullopt;
    if (descriptor[j] == 'L') {
      j = descriptor.find(';', j);
      if (j == std::string_view::npos || j > close) return std::nullopt;
    }
    auto type = descriptor.substr(i, j - i + 1);
    if (!IsValidTypeDescriptor(type, false)) return std::nullopt;
    out.parameters.emplace_back(type);
    i = j + 1;
  }
  out.return_type = std::string(descriptor.substr(close + 1));
  if (!IsValidTypeDescriptor(out.return_type, true)) return std::nullopt;
  return out;
}

ForgeInsn ForgeInsn::ConstString(std::string text) {
  ForgeInsn i;
  i.op = Op::kConstString;
  i.text = std::move(text);
  return i;
}
ForgeInsn ForgeInsn::ConstClass(std::string type) {
  ForgeInsn i;
  i.op = Op::kConstClass;
  i.text = std::move(type);
  return i;
}
ForgeInsn ForgeInsn::Invoke(InvokeStyle style, MethodRef target, bool range) {
  ForgeInsn i;
  i.op = Op::kInvoke;
  i.style = style;
  i.target = std::move(target);
  i.range = range;
  return i;
}
ForgeInsn ForgeInsn::ReturnVoid() {
  ForgeInsn i;
  i.op = Op::kReturnVoid;
  return i;
}
ForgeInsn ForgeInsn::Opaque(std::uint8_t opcode) {
  ForgeInsn i;
  i.op = Op::kOpaque;
  i.opcode = opcode;
  return i;
}
ForgeInsn ForgeInsn::PackedSwitch(std::uint32_t targets) {
  ForgeInsn i;
  i.op = Op::kPackedSwitchPayload;
  i.count = targets;
  return i;
}
ForgeInsn ForgeInsn::SparseSwitch(std::uint32_t entries) {
  ForgeInsn i;
  i.op = Op::kSparseSwitchPayload;
  i.count = entries;
  return i;
}
ForgeInsn ForgeInsn::FillArrayData(std::uint16_t element_width, std::uint32_t elements) {
  ForgeInsn i;
  i.op = Op::kFillArrayDataPayload;
  i.element_width = element_width;
  i.count = elements;
  return i;
}

bool ForgeMethod::IsDirect() const {
  return (access_flags & (kAccStatic | kAccPrivate | kAccConstructor)) != 0 || name == "<init>" ||
         name == "<clinit>";
}

Bytes ForgeDex(const DexSpec& spec) {
  // Gather every string, type, prototype and method the file must define.
  std::set<std::string, Utf16Less> strings(spec.strings.begin(), spec.strings.end());
  std::set<std::string> types;
  std::set<std::string> descriptors;
  std::set<MethodRef> method_refs;

  auto add_type = [&](const std::string& t) {
    RequireType(t);
    types.insert(t);
    strings.insert(t);
  };
  auto add_descriptor = [&](const std::string& d) {
    auto parsed = RequireDescriptor(d);
    descriptors.insert(d);
    for (const auto& p : parsed.parameters) add_type(p);
    types.insert(parsed.return_type);
    strings.insert(parsed.return_type);
    std::string shorty(1, ShortyChar(parsed.return_type));
    for (const auto& p : parsed.parameters) shorty.push_back(ShortyChar(p));
    strings.insert(shorty);
  };
  auto add_method = [&](const MethodRef& m) {
    add_type(m.defining_type);
    strings.insert(m.name);
    add_descriptor(m.descriptor);
    method_refs.insert(m);
  };

  for (const auto& cls : spec.classes) {
    add_type(cls.type);
    if (cls.superclass) add_type(*cls.superclass);
    for (const auto& i : cls.interfaces) add_type(i);
    for (const auto& m : cls.methods) {
      add_method(MethodRef{cls.type, m.name, m.descriptor});
      for (const auto& insn : m.code) {
        switch (insn.op) {
          case ForgeInsn::Op::kConstString: strings.insert(insn.text); break;
          case ForgeInsn::Op::kConstClass: add_type(insn.text); break;
          case ForgeInsn::Op::kInvoke: add_method(insn.target); break;
          case ForgeInsn::Op::kOpaque: {
            const auto op = insn.opcode;
            if (op == 0x1a || op == 0x1b || op == 0x1c || (op >= 0x6e && op <= 0x72) ||
                (op >= 0x74 && op <= 0x78)) {
              throw Error(ErrorCode::kBadConfig,
                          "opcode " + std::to_string(op) + " has its own forge instruction");
            }
            break;
          }
          default: break;
        }
      }
    }
  }

  std::vector<std::string> string_list(strings.begin(), strings.end());
  std::map<std::string, std::uint32_t> string_index;
  for (std::uint32_t i = 0; i < string_list.size(); ++i) string_index[string_list[i]] = i;

  // Type ids sorted by string index.
  std::vector<std::string> type_list(types.begin(), types.end());
  std::sort(type_list.begin(), type_list.end(), [&](const auto& a, const auto& b) {
    return string_index.at(a) < string_index.at(b);
  });
  if (type_list.size() > 0xffff) throw Error(ErrorCode::kSpecTooLarge, "more than 65535 types");
  std::map<std::string, std::uint32_t> type_index;
  for (std::uint32_t i = 0; i < type_list.size(); ++i) type_index[type_list[i]] = i;

  // Proto ids sorted by return type index, then parameter type indices.
  struct Proto {
    std::string descriptor;
    std::string shorty;
    std::uint32_t return_idx;
    std::vector<std::uint16_t> params;
  };
  std::vector<Proto> protos;
  for (const auto& d : descriptors) {
    auto parsed = RequireDescriptor(d);
    Proto p{d, std::string(1, ShortyChar(parsed.return_type)), type_index.at(parsed.return_type), {}};
    for (const auto& t : parsed.parameters) {
      p.shorty.push_back(ShortyChar(t));
      p.params.push_back(static_cast<std::uint16_t>(type_index.at(t)));
    }
    protos.push_back(std::move(p));
  }
  std::sort(protos.begin(), protos.end(), [](const Proto& a, const Proto& b) {
    return std::tie(a.return_idx, a.params) < std::tie(b.return_idx, b.params);
  });
  if (protos.size() > 0xffff) throw Error(ErrorCode::kSpecTooLarge, "more than 65535 prototypes");
  std::map<std::string, std::uint32_t> proto_index;
  for (std::uint32_t i = 0; i < protos.size(); ++i) proto_index[protos[i].descriptor] = i;

  // Method ids sorted by defining type, name, prototype.
  std::vector<MethodRef> method_list(method_refs.begin(), method_refs.end());
  auto method_key = [&](const MethodRef& m) {
    return std::make_tuple(type_index.at(m.defining_type), string_index.at(m.name),
                           proto_index.at(m.descriptor));
  };
  std::sort(method_list.begin(), method_list.end(),
            [&](const auto& a, const auto& b) { return method_key(a) < method_key(b); });
  std::map<MethodRef, std::uint32_t> method_index;
  for (std::uint32_t i = 0; i < method_list.size(); ++i) method_index[method_list[i]] = i;

  // Layout: header and id tables, then the data section.
  const std::size_t string_ids_off = kHeaderSize;
  const std::size_t type_ids_off = string_ids_off + 4 * string_list.size();
  const std::size_t proto_ids_off = type_ids_off + 4 * type_list.size();
  const std::size_t method_ids_off = proto_ids_off + 12 * protos.size();
  const std::size_t class_defs_off = method_ids_off + 8 * method_list.size();
  const std::size_t data_off = class_defs_off + 32 * spec.classes.size();
  if (data_off > 0xffffffffull) throw Error(ErrorCode::kSpecTooLarge, "id tables exceed 4 GiB");

  ByteWriter w;
  w.Zeros(data_off);

  struct MapItem {
    std::uint16_t type;
    std::uint32_t size;
    std::uint32_t offset;
  };
  std::vector<MapItem> map_items = {{0x0000, 1, 0}};
  auto add_map = [&](std::uint16_t type, std::size_t count, std::size_t offset) {
    if (count > 0) map_items.push_back({type, static_cast<std::uint32_t>(count), static_cast<std::uint32_t>(offset)});
  };
  add_map(0x0001, string_list.size(), string_ids_off);
  add_map(0x0002, type_list.size(), type_ids_off);
  add_map(0x0003, protos.size(), proto_ids_off);
  add_map(0x0005, method_list.size(), method_ids_off);
  add_map(0x0006, spec.classes.size(), class_defs_off);

  // Type lists (proto parameters and class interfaces), deduplicated.
  std::map<std::vector<std::uint16_t>, std::uint32_t> type_list_off;
  std::size_t type_list_start = 0, type_list_count = 0;
  auto emit_type_list = [&](const std::vector<std::uint16_t>& list) -> std::uint32_t {
    if (list.empty()) return 0;
    if (auto it = type_list_off.find(list); it != type_list_off.end()) return it->second;
    w.AlignTo(4);
    if (type_list_count++ == 0) type_list_start = w.size();
    const auto off = static_cast<std::uint32_t>(w.size());
    w.U32(static_cast<std::uint32_t>(list.size()));
    for (auto t : list) w.U16(t);
    type_list_off.emplace(list, off);
    return off;
  };
  for (std::size_t i = 0; i < protos.size(); ++i) {
    const std::size_t base = proto_ids_off + 12 * i;
    w.PatchU32(base, string_index.at(protos[i].shorty));
    w.PatchU32(base + 4, protos[i].return_idx);
    w.PatchU32(base + 8, emit_type_list(protos[i].params));
  }
  std::vector<std::uint32_t> interfaces_off;
  for (const auto& cls : spec.classes) {
    std::vector<std::uint16_t> list;
    for (const auto& i : cls.interfaces) list.push_back(static_cast<std::uint16_t>(type_index.at(i)));
    interfaces_off.push_back(emit_type_list(list));
  }
  add_map(0x1001, type_list_count, type_list_start);

  // Code items.
  auto encode_code = [&](const ForgeClass& cls, const ForgeMethod& m) {
    std::vector<std::uint16_t> units;
    std::uint32_t outs = 0;
    for (const auto& insn : m.code) {
      switch (insn.op) {
        case ForgeInsn::Op::kConstString: {
          const std::uint32_t idx = string_index.at(insn.text);
          if (idx <= 0xffff) {
            units.insert(units.end(), {0x001a, static_cast<std::uint16_t>(idx)});
          } else {
            units.insert(units.end(), {0x001b, static_cast<std::uint16_t>(idx),
                                       static_cast<std::uint16_t>(idx >> 16)});
          }
          break;
        }
        case ForgeInsn::Op::kConstClass:
          units.insert(units.end(), {0x001c, static_cast<std::uint16_t>(type_index.at(insn.text))});
          break;
        case ForgeInsn::Op::kInvoke: {
          const std::uint32_t idx = method_index.at(insn.target);
          if (idx > 0xffff) throw Error(ErrorCode::kSpecTooLarge, "method index exceeds 16 bits");
          const bool is_static = insn.style == InvokeStyle::kStatic;
          const std::uint32_t words = ArgWords(RequireDescriptor(insn.target.descriptor), is_static);
          outs = std::max(outs, words);
          const auto base = static_cast<std::uint16_t>(0x6e + static_cast<int>(insn.style));
          if (insn.range) {
            units.insert(units.end(), {static_cast<std::uint16_t>((base + 6) | (words << 8)),
                                       static_cast<std::uint16_t>(idx), 0});
          } else {
            const std::uint32_t a = std::min<std::uint32_t>(words, 5);
            std::uint16_t regs = 0;
            for (std::uint32_t r = 0; r < std::min<std::uint32_t>(a, 4); ++r) regs |= r << (4 * r);
            units.insert(units.end(), {static_cast<std::uint16_t>(base | (a << 12)),
                                       static_cast<std::uint16_t>(idx), regs});
          }
          break;
        }
        case ForgeInsn::Op::kReturnVoid: units.push_back(0x000e); break;
        case ForgeInsn::Op::kNop: units.push_back(0x0000); break;
        case ForgeInsn::Op::kOpaque:
          units.push_back(insn.opcode);
          units.insert(units.end(), OpcodeWidth(insn.opcode) - 1, 0);
          break;
        case ForgeInsn::Op::kPackedSwitchPayload:
          units.insert(units.end(), {0x0100, static_cast<std::uint16_t>(insn.count), 0, 0});
          units.insert(units.end(), 2 * insn.count, 0);
          break;
        case ForgeInsn::Op::kSparseSwitchPayload:
          units.insert(units.end(), {0x0200, static_cast<std::uint16_t>(insn.count)});
          units.insert(units.end(), 4 * insn.count, 0);
          break;
        case ForgeInsn::Op::kFillArrayDataPayload:
          units.insert(units.end(), {0x0300, insn.element_width, static_cast<std::uint16_t>(insn.count),
                                     static_cast<std::uint16_t>(insn.count >> 16)});
          units.insert(units.end(), (std::uint64_t{insn.element_width} * insn.count + 1) / 2, 0);
          break;
      }
    }
    const std::uint32_t ins =
        ArgWords(RequireDescriptor(m.descriptor), (m.access_flags & kAccStatic) != 0);
    (void)cls;
    w.AlignTo(4);
    const auto off = static_cast<std::uint32_t>(w.size());
    w.U16(static_cast<std::uint16_t>(std::max<std::uint32_t>(16, ins)));
    w.U16(static_cast<std::uint16_t>(ins));
    w.U16(static_cast<std::uint16_t>(outs));
    w.U16(0);  // tries
    w.U32(0);  // debug info
    w.U32(static_cast<std::uint32_t>(units.size()));
    for (auto u : units) w.U16(u);
    return off;
  };

  std::map<std::pair<std::size_t, std::size_t>, std::uint32_t> code_off;
  std::size_t code_start = 0, code_count = 0;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    for (std::size_t m = 0; m < spec.classes[c].methods.size(); ++m) {
      const auto& method = spec.classes[c].methods[m];
      if (!method.has_code) continue;
      const auto off = encode_code(spec.classes[c], method);
      if (code_count++ == 0) code_start = off;
      code_off[{c, m}] = off;
    }
  }
  add_map(0x2001, code_count, code_start);

  // String data.
  const std::size_t string_data_start = w.size();
  for (std::size_t i = 0; i < string_list.size(); ++i) {
    w.PatchU32(string_ids_off + 4 * i, static_cast<std::uint32_t>(w.size()));
    auto [mutf8, units] = EncodeMutf8(string_list[i]);
    w.Uleb128(units);
    w.Append(mutf8);
    w.U8(0);
  }
  add_map(0x2002, string_list.size(), string_data_start);

  // Class data.
  std::size_t class_data_start = 0, class_data_count = 0;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto& cls = spec.classes[c];
    std::vector<std::pair<std::uint32_t, std::size_t>> direct, virt;
    std::set<std::uint32_t> seen;
    for (std::size_t m = 0; m < cls.methods.size(); ++m) {
      const auto idx = method_index.at(MethodRef{cls.type, cls.methods[m].name, cls.methods[m].descriptor});
      if (!seen.insert(idx).second) {
        throw Error(ErrorCode::kBadConfig, "method defined twice in " + cls.type);
      }
      (cls.methods[m].IsDirect() ? direct : virt).emplace_back(idx, m);
    }
    std::sort(direct.begin(), direct.end());
    std::sort(virt.begin(), virt.end());

    std::uint32_t class_data = 0;
    if (!cls.methods.empty()) {
      class_data = static_cast<std::uint32_t>(w.size());
      if (class_data_count++ == 0) class_data_start = class_data;
      w.Uleb128(0);
      w.Uleb128(0);
      w.Uleb128(static_cast<std::uint32_t>(direct.size()));
      w.Uleb128(static_cast<std::uint32_t>(virt.size()));
      for (const auto* list : {&direct, &virt}) {
        std::uint32_t prev = 0;
        for (const auto& [idx, m] : *list) {
          w.Uleb128(idx - prev);
          prev = idx;
          std::uint32_t flags = cls.methods[m].access_flags;
          if (cls.methods[m].name == "<init>" || cls.methods[m].name == "<clinit>") flags |= kAccConstructor;
          w.Uleb128(flags);
          auto it = code_off.find({c, m});
          w.Uleb128(it == code_off.end() ? 0 : it->second);
        }
      }
    }

    const std::size_t base = class_defs_off + 32 * c;
    w.PatchU32(base, type_index.at(cls.type));
    w.PatchU32(base + 4, cls.access_flags);
    w.PatchU32(base + 8, cls.superclass ? type_index.at(*cls.superclass) : kNoIndex);
    w.PatchU32(base + 12, interfaces_off[c]);
    w.PatchU32(base + 16, kNoIndex);  // source file
    w.PatchU32(base + 20, 0);
    w.PatchU32(base + 24, class_data);
    w.PatchU32(base + 28, 0);
  }
  add_map(0x2000, class_data_count, class_data_start);

  // Id tables.
  for (std::size_t i = 0; i < type_list.size(); ++i) {
    w.PatchU32(type_ids_off + 4 * i, string_index.at(type_list[i]));
  }
  for (std::size_t i = 0; i < method_list.size(); ++i) {
    const std::size_t base = method_ids_off + 8 * i;
    w.PatchU16(base, static_cast<std::uint16_t>(type_index.at(method_list[i].defining_type)));
    w.PatchU16(base + 2, static_cast<std::uint16_t>(proto_index.at(method_list[i].descriptor)));
    w.PatchU32(base + 4, string_index.at(method_list[i].name));
  }

  w.AlignTo(4);
  const auto map_off = static_cast<std::uint32_t>(w.size());
  add_map(0x1000, 1, map_off);
  std::sort(map_items.begin(), map_items.end(),
            [](const MapItem& a, const MapItem& b) { return a.offset < b.offset; });
  w.U32(static_cast<std::uint32_t>(map_items.size()));
  for (const auto& item : map_items) {
    w.U16(item.type);
    w.U16(0);
    w.U32(item.size);
    w.U32(item.offset);
  }
  if (w.size() > 0xffffffffull) throw Error(ErrorCode::kSpecTooLarge, "file exceeds 4 GiB");

  // Header.
  static constexpr std::uint8_t kMagic[8] = {'d', 'e', 'x', '\n', '0', '3', '5', 0};
  for (int i = 0; i < 8; ++i) w.data()[i] = kMagic[i];
  const auto file_size = static_cast<std::uint32_t>(w.size());
  w.PatchU32(32, file_size);
  w.PatchU32(36, kHeaderSize);
  w.PatchU32(40, 0x12345678);
  w.PatchU32(52, map_off);
  auto patch_section = [&](std::size_t at, std::size_t count, std::size_t off) {
    w.PatchU32(at, static_cast<std::uint32_t>(count));
    w.PatchU32(at + 4, count == 0 ? 0 : static_cast<std::uint32_t>(off));
  };
  patch_section(56, string_list.size(), string_ids_off);
  patch_section(64, type_list.size(), type_ids_off);
  patch_section(72, protos.size(), proto_ids_off);
  patch_section(80, 0, 0);
  patch_section(88, method_list.size(), method_ids_off);
  patch_section(96, spec.classes.size(), class_defs_off);
  patch_section(104, file_size - data_off, data_off);

  Bytes out = w.Release();
  const auto sha = Sha1(ByteView(out).subspan(32));
  std::copy(sha.begin(), sha.end(), out.begin() + 12);
  const std::uint32_t checksum = Adler32(ByteView(out).subspan(12));
  for (int i = 0; i < 4; ++i) out[8 + i] = static_cast<std::uint8_t>(checksum >> (8 * i));
  return out;
}

DexSpec DescribeDex(const DexFile& dex) {
  DexSpec spec;
  for (auto& [idx, text] : IterStrings(dex)) spec.strings.push_back(text);
  for (const auto& cls : dex.classes()) {
    ForgeClass fc;
    fc.type = cls.this_type;
    fc.superclass = cls.superclass_type;
    fc.interfaces = cls.interfaces;
    fc.access_flags = cls.access_flags;
    for (const auto& em : cls.methods) {
      ForgeMethod fm;
      fm.name = em.ref.name;
      fm.descriptor = em.ref.descriptor;
      fm.access_flags = em.access_flags & ~kAccConstructor;
      fm.has_code = em.code.has_value();
      if (em.code) {
        for (const auto& insn : em.code->insns) {
          switch (insn.kind) {
            case InsnKind::kConstString:
              fm.code.push_back(ForgeInsn::ConstString(dex.string_at(insn.index)));
              break;
            case InsnKind::kConstClass:
              fm.code.push_back(ForgeInsn::ConstClass(dex.type_at(insn.index)));
              break;
            case InsnKind::kInvoke:
              fm.code.push_back(ForgeInsn::Invoke(insn.invoke_style, dex.method_at(insn.index), insn.range));
              break;
            case InsnKind::kOther:
              if (insn.payload_ident == 0x0100) {
                fm.code.push_back(ForgeInsn::PackedSwitch(insn.index));
              } else if (insn.payload_ident == 0x0200) {
                fm.code.push_back(ForgeInsn::SparseSwitch(insn.index));
              } else if (insn.payload_ident == 0x0300) {
                fm.code.push_back(ForgeInsn::FillArrayData(insn.element_width, insn.index));
              } else if (insn.opcode == 0x0e) {
                fm.code.push_back(ForgeInsn::ReturnVoid());
              } else if (insn.opcode == 0x00) {
                fm.code.push_back(ForgeInsn{});
              } else {
                fm.code.push_back(ForgeInsn::Opaque(insn.opcode));
              }
              break;
          }
        }
      }
      fc.methods.push_back(std::move(fm));
    }
    spec.classes.push_back(std::move(fc));
  }
  return spec;
}

}  // namespace bctx::dex
