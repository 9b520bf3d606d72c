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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include <png.h>

namespace bctx::oracle {

std::optional<std::string> Mutf8ToUtf8(ByteView data) {
  std::vector<std::uint16_t> units;
  for (std::size_t i = 0; i < data.size();) {
    const std::uint8_t a = data[i];
    if (a == 0) return std::nullopt;
    if (a < 0x80) {
      units.push_back(a);
      i += 1;
    } else if ((a & 0xE0) == 0xC0) {
      if (i + 1 >= data.size() || (data[i + 1] & 0xC0) != 0x80) return std::nullopt;
      units.push_back(static_cast<std::uint16_t>(((a & 0x1F) << 6) | (data[i + 1] & 0x3F)));
      i += 2;
    } else if ((a & 0xF0) == 0xE0) {
      if (i + 2 >= data.size() || (data[i + 1] & 0xC0) != 0x80 || (data[i + 2] & 0xC0) != 0x80) return std::nullopt;
      units.push_back(static_cast<std::uint16_t>(((a & 0x0F) << 12) | ((data[i + 1] & 0x3F) << 6) | (data[i + 2] & 0x3F)));
      i += 3;
    } else {
      return std::nullopt;
    }
  }
  std::string out;
  auto put = [&out](std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  };
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::uint16_t u = units[i];
    if (u >= 0xD800 && u <= 0xDBFF && i + 1 < units.size() && units[i + 1] >= 0xDC00 && units[i + 1] <= 0xDFFF) {
      put(0x10000 + ((static_cast<std::uint32_t>(u) - 0xD800) << 10) + (units[i + 1] - 0xDC00));
      ++i;
    } else {
      put(u);
    }
  }
  return out;
}

namespace {

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.Below(v.size())];
}

const std::vector<std::string>& StringPool() {
  static const std::vector<std::string> pool = {
      "",
      "http://a.com",
      "https://evil.example.net/path/",
      "192.168.1.20",
      std::string("nul\0byte", 8),
      "caf\xC3\xA9",
      "\xE6\x97\xA5\xE6\x9C\xAC",
      "emoji \xF0\x9F\x98\x80 pair",
      "plain text",
      "Lnot/a/Type;",
  };
  return pool;
}

const std::vector<std::string>& Descriptors() {
  static const std::vector<std::string> d = {"()V", "(I)V", "(Ljava/lang/String;)Z", "([BJ)Ljava/lang/Object;",
                                             "(DF)[I", "(Landroid/os/Bundle;)V"};
  return d;
}

bool ForbiddenOpaque(std::uint8_t op) {
  return op == 0x00 || op == 0x0e || op == 0x1a || op == 0x1b || op == 0x1c || (op >= 0x6e && op <= 0x72) ||
         (op >= 0x74 && op <= 0x78);
}

}  // namespace

dex::DexSpec RandomDexSpec(Rng& rng) {
  dex::DexSpec spec;
  const std::size_t n_classes = 1 + rng.Below(4);
  std::vector<std::string> types;
  for (std::size_t c = 0; c < n_classes; ++c) {
    types.push_back("Lrt/p" + std::to_string(rng.Below(3)) + "/K" + std::to_string(c) + ";");
  }
  std::vector<dex::MethodRef> targets = {{"Lext/Lib;", "call", "(I)V"},
                                         {"Landroid/app/Activity;", "startActivity", "(Landroid/content/Intent;)V"},
                                         {"Ljava/lang/Object;", "toString", "()Ljava/lang/String;"}};
  for (std::size_t c = 0; c < n_classes; ++c) {
    dex::ForgeClass cls;
    cls.type = types[c];
    const auto sup = rng.Below(4);
    if (sup == 0) cls.superclass = "Landroid/app/Activity;";
    else if (sup == 1 && c > 0) cls.superclass = types[rng.Below(c)];
    const auto ifaces = rng.Below(3);
    if (ifaces >= 1) cls.interfaces.push_back("Ljava/lang/Runnable;");
    if (ifaces >= 2) cls.interfaces.push_back("Landroid/view/View$OnClickListener;");
    cls.access_flags = rng.Below(2) == 0 ? dex::kAccPublic : dex::kAccPublic | 0x10;
    std::set<std::pair<std::string, std::string>> seen;
    const std::size_t n_methods = rng.Below(5);
    for (std::size_t m = 0; m < n_methods; ++m) {
      dex::ForgeMethod fm;
      fm.name = std::vector<std::string>{"run", "onCreate", "a", "b", "work", "m" + std::to_string(m)}[rng.Below(6)];
      fm.descriptor = Pick(rng, Descriptors());
      if (!seen.insert({fm.name, fm.descriptor}).second) continue;
      switch (rng.Below(5)) {
        case 0: fm.access_flags = dex::kAccPublic | dex::kAccStatic; break;
        case 1: fm.access_flags = dex::kAccPrivate; break;
        case 2:
          fm.access_flags = dex::kAccPublic | dex::kAccAbstract;
          fm.has_code = false;
          break;
        case 3:
          fm.access_flags = dex::kAccPublic | dex::kAccNative;
          fm.has_code = false;
          break;
        default: fm.access_flags = dex::kAccPublic;
      }
      if (fm.has_code) {
        const std::size_t n_insns = rng.Below(13);
        for (std::size_t i = 0; i < n_insns; ++i) {
          switch (rng.Below(9)) {
            case 0: fm.code.push_back(dex::ForgeInsn::ConstString(Pick(rng, StringPool()))); break;
            case 1:
              fm.code.push_back(dex::ForgeInsn::ConstClass(
                  std::vector<std::string>{"Lext/Thing;", "[I", "[Ljava/lang/String;", types[rng.Below(types.size())]}
                      [rng.Below(4)]));
              break;
            case 2: {
              dex::MethodRef t = rng.Below(2) == 0 ? Pick(rng, targets)
                                                   : dex::MethodRef{types[rng.Below(types.size())], "run", "()V"};
              fm.code.push_back(dex::ForgeInsn::Invoke(static_cast<dex::InvokeStyle>(rng.Below(5)), t, rng.Below(2) == 0));
              break;
            }
            case 3: fm.code.push_back(dex::ForgeInsn::ReturnVoid()); break;
            case 4: fm.code.push_back(dex::ForgeInsn{}); break;
            case 5: {
              std::uint8_t op;
              do {
                op = static_cast<std::uint8_t>(rng.Below(256));
              } while (ForbiddenOpaque(op));
              fm.code.push_back(dex::ForgeInsn::Opaque(op));
              break;
            }
            case 6: fm.code.push_back(dex::ForgeInsn::PackedSwitch(static_cast<std::uint32_t>(rng.Below(6)))); break;
            case 7: fm.code.push_back(dex::ForgeInsn::SparseSwitch(static_cast<std::uint32_t>(rng.Below(6)))); break;
            default: {
              const std::uint16_t widths[] = {1, 2, 4, 8};
              fm.code.push_back(dex::ForgeInsn::FillArrayData(widths[rng.Below(4)], static_cast<std::uint32_t>(rng.Below(7))));
            }
          }
        }
      }
      cls.methods.push_back(std::move(fm));
    }
    spec.classes.push_back(std::move(cls));
  }
  if (rng.Below(2) == 0) spec.strings.push_back("extra pool string " + std::to_string(rng.Below(1000)));
  return spec;
}

dex::DexSpec Canonical(dex::DexSpec spec) {
  spec.strings.clear();
  std::sort(spec.classes.begin(), spec.classes.end(),
            [](const dex::ForgeClass& a, const dex::ForgeClass& b) { return a.type < b.type; });
  for (auto& c : spec.classes) {
    std::sort(c.methods.begin(), c.methods.end(), [](const dex::ForgeMethod& a, const dex::ForgeMethod& b) {
      return std::make_tuple(!a.IsDirect(), a.name, a.descriptor) < std::make_tuple(!b.IsDirect(), b.name, b.descriptor);
    });
  }
  return spec;
}

std::string CompareObservable(const dex::DexSpec& forged, const dex::DexSpec& described) {
  for (const auto& s : forged.strings) {
    if (std::find(described.strings.begin(), described.strings.end(), s) == described.strings.end()) {
      return "missing pool string '" + s + "'";
    }
  }
  const auto a = Canonical(forged), b = Canonical(described);
  if (a.classes.size() != b.classes.size()) return "class count differs";
  for (std::size_t c = 0; c < a.classes.size(); ++c) {
    const auto &x = a.classes[c], &y = b.classes[c];
    if (x.type != y.type || x.superclass != y.superclass || x.interfaces != y.interfaces ||
        x.access_flags != y.access_flags) {
      return "class header differs for " + x.type;
    }
    if (x.methods.size() != y.methods.size()) return "method count differs for " + x.type;
    for (std::size_t m = 0; m < x.methods.size(); ++m) {
      const auto &p = x.methods[m], &q = y.methods[m];
      if (p.name != q.name || p.descriptor != q.descriptor || p.access_flags != q.access_flags ||
          p.has_code != q.has_code) {
        return "method header differs: " + x.type + "->" + p.name + p.descriptor;
      }
      if (p.code.size() != q.code.size()) return "instruction count differs in " + x.type + "->" + p.name;
      for (std::size_t i = 0; i < p.code.size(); ++i) {
        if (!(p.code[i] == q.code[i])) {
          return "instruction " + std::to_string(i) + " differs in " + x.type + "->" + p.name + p.descriptor;
        }
      }
    }
  }
  return {};
}

DecodedPng DecodePng(ByteView png) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, png.data(), png.size())) {
    throw std::runtime_error(std::string("libpng: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  DecodedPng out;
  out.width = image.width;
  out.height = image.height;
  out.rgb.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
    png_image_free(&image);
    throw std::runtime_error(std::string("libpng: ") + image.message);
  }
  return out;
}

std::vector<std::uint8_t> BoxDownsample(const std::vector<std::uint8_t>& src, std::size_t src_side,
                                        std::size_t dst_side, std::size_t channels) {
  // Membership of source index i in [a*s/d, (a+1)*s/d), tested as
  // a*s <= i*d < (a+1)*s.
  std::vector<std::uint8_t> out(dst_side * dst_side * channels);
  const std::uint64_t s = src_side, d = dst_side;
  auto inside = [&](std::uint64_t a, std::uint64_t i) { return a * s <= i * d && i * d < (a + 1) * s; };
  for (std::uint64_t y = 0; y < d; ++y) {
    std::vector<std::uint64_t> rows;
    for (std::uint64_t sy = 0; sy < s; ++sy) {
      if (inside(y, sy)) rows.push_back(sy);
    }
    for (std::uint64_t x = 0; x < d; ++x) {
      std::vector<std::uint64_t> cols;
      for (std::uint64_t sx = 0; sx < s; ++sx) {
        if (inside(x, sx)) cols.push_back(sx);
      }
      for (std::size_t c = 0; c < channels; ++c) {
        std::uint64_t sum = 0;
        for (auto sy : rows) {
          for (auto sx : cols) sum += src[(sy * s + sx) * channels + c];
        }
        const std::uint64_t n = rows.size() * cols.size();
        out[(y * d + x) * channels + c] = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
      }
    }
  }
  return out;
}

Adjacency RandomDag(Rng& rng, std::size_t nodes, double edge_prob) {
  // Random topological order over nodes 1..n-1; the root precedes all.
  std::vector<NodeId> order;
  for (NodeId i = 1; i < nodes; ++i) order.push_back(i);
  rng.Shuffle(std::span<NodeId>(order));
  order.insert(order.begin(), 0);
  Adjacency adj(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) {
      if (rng.Uniform() < edge_prob) adj[order[i]].push_back(order[j]);
    }
  }
  return adj;
}

Adjacency RandomGraph(Rng& rng, std::size_t nodes, double edge_prob) {
  Adjacency adj(nodes);
  for (NodeId i = 0; i < nodes; ++i) {
    for (NodeId j = 1; j < nodes; ++j) {
      if (i != j && rng.Uniform() < edge_prob) adj[i].push_back(j);
    }
  }
  return adj;
}

IccgGraph GraphFrom(const Adjacency& adj) {
  IccgGraph g;
  for (std::size_t i = 1; i < adj.size(); ++i) {
    g.AddNode("Lg;->n" + std::to_string(i) + "()V", "Lg;", true);
  }
  for (NodeId i = 0; i < adj.size(); ++i) {
    for (NodeId j : adj[i]) g.AddEdge(i, j, kEdgeExplicit);
  }
  return g;
}

std::uint64_t BruteForcePaths(const Adjacency& adj, NodeId root, NodeId target) {
  std::vector<bool> on_path(adj.size(), false);
  std::function<std::uint64_t(NodeId)> dfs = [&](NodeId v) -> std::uint64_t {
    if (v == target) return 1;
    on_path[v] = true;
    std::uint64_t n = 0;
    for (NodeId w : adj[v]) {
      if (!on_path[w]) n += dfs(w);
    }
    on_path[v] = false;
    return n;
  };
  return dfs(root);
}

std::uint64_t CondensationPaths(const Adjacency& adj, NodeId root, NodeId target) {
  const std::size_t n = adj.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (NodeId j : adj[i]) reach[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::vector<std::size_t> comp(n, SIZE_MAX);
  std::size_t comps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != SIZE_MAX) continue;
    for (std::size_t j = i; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) comp[j] = comps;
    }
    ++comps;
  }
  Adjacency cadj(comps);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : adj[i]) {
      if (comp[i] != comp[j] && seen.insert({comp[i], comp[j]}).second) {
        cadj[comp[i]].push_back(static_cast<NodeId>(comp[j]));
      }
    }
  }
  return BruteForcePaths(cadj, static_cast<NodeId>(comp[root]), static_cast<NodeId>(comp[target]));
}

std::vector<double> StraightLineForward(const FusionModel& model, const FeatureTriple& input) {
  std::vector<double> concat;
  for (std::size_t v = 0; v < 3; ++v) {
    if (!model.views[v]) continue;
    std::vector<double> x = input.view(static_cast<View>(v));
    if (v == 2) {
      for (double& c : x) c = model.raw_counts ? c : std::log(1.0 + c);
    }
    const auto& p = model.projections[v];
    for (Eigen::Index r = 0; r < p.w.rows(); ++r) {
      long double acc = p.b(r);
      for (Eigen::Index c = 0; c < p.w.cols(); ++c) acc += static_cast<long double>(p.w(r, c)) * x[static_cast<std::size_t>(c)];
      concat.push_back(acc > 0 ? static_cast<double>(acc) : 0.0);
    }
  }
  std::vector<double> h = concat;
  auto dense = [](const Linear& l, const std::vector<double>& in, bool relu) {
    std::vector<double> out(static_cast<std::size_t>(l.w.rows()));
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      long double acc = l.b(r);
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) acc += static_cast<long double>(l.w(r, c)) * in[static_cast<std::size_t>(c)];
      out[static_cast<std::size_t>(r)] = relu && acc < 0 ? 0.0 : static_cast<double>(acc);
    }
    return out;
  };
  for (const auto& l : model.hidden) h = dense(l, h, true);
  std::vector<double> logits = dense(model.output, h, false);
  long double mx = *std::max_element(logits.begin(), logits.end()), z = 0;
  for (double v : logits) z += std::exp(static_cast<long double>(v) - mx);
  std::vector<double> p;
  for (double v : logits) p.push_back(static_cast<double>(std::exp(static_cast<long double>(v) - mx) / z));
  return p;
}

std::pair<double, double> CellStats(const std::vector<std::uint8_t>& image, std::size_t cell_x, std::size_t cell_y,
                                    std::size_t channel) {
  long double sum = 0, sq = 0;
  for (std::size_t y = cell_y * 30; y < cell_y * 30 + 30; ++y) {
    for (std::size_t x = cell_x * 30; x < cell_x * 30 + 30; ++x) {
      const long double v = image[(y * 300 + x) * 3 + channel] / 255.0L;
      sum += v;
      sq += v * v;
    }
  }
  const long double mean = sum / 900.0L;
  const long double var = std::max<long double>(0, sq / 900.0L - mean * mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var))};
}

}  // namespace bctx::oracle
