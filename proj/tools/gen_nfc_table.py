# Copyright (c) 2026 The xltts Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates src/text/nfc_data.h from the Unicode character database.

The header carries three sorted tables:
  * full canonical decompositions (NFD), Hangul excluded (it is algorithmic),
  * nonzero canonical combining classes,
  * primary composition pairs (exclusions already filtered out, because each
    candidate pair is validated against the reference normalizer).

Run from the repository root:  python3 tools/gen_nfc_table.py
"""

import sys
import unicodedata

HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def main() -> None:
    decomp = {}  # cp -> full canonical decomposition (list of cps)
    ccc = {}  # cp -> nonzero combining class
    comp = {}  # (starter, combining) -> composed cp

    for cp in range(0x110000):
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue  # algorithmic in code
        if 0xD800 <= cp <= 0xDFFF:
            continue  # surrogates
        ch = chr(cp)
        k = unicodedata.combining(ch)
        if k:
            ccc[cp] = k
        d = unicodedata.decomposition(ch)
        if d and not d.startswith("<"):
            full = [ord(c) for c in unicodedata.normalize("NFD", ch)]
            if full != [cp]:
                decomp[cp] = full
            parts = [int(x, 16) for x in d.split()]
            if len(parts) == 2:
                a, b = parts
                # A pair belongs in the composition table exactly when the
                # reference normalizer recomposes it; this drops the
                # composition exclusions without needing the exclusion list.
                if unicodedata.normalize("NFC", chr(a) + chr(b)) == ch:
                    comp[(a, b)] = cp

    flat = []
    entries = []
    for cp in sorted(decomp):
        seq = decomp[cp]
        entries.append((cp, len(flat), len(seq)))
        flat.extend(seq)

    lines = []
    lines.append("// Generated by tools/gen_nfc_table.py from Unicode "
                 f"{unicodedata.unidata_version}; do not edit.")
    lines.append("#ifndef XLTTS_TEXT_NFC_DATA_H_")
    lines.append("#define XLTTS_TEXT_NFC_DATA_H_")
    lines.append("")
    lines.append("#include <cstdint>")
    lines.append("")
    lines.append("namespace xltts {")
    lines.append("namespace nfc {")
    lines.append("")
    lines.append("struct DecompEntry {")
    lines.append("  uint32_t cp;")
    lines.append("  uint32_t offset;")
    lines.append("  uint32_t length;")
    lines.append("};")
    lines.append("")
    lines.append("struct CccEntry {")
    lines.append("  uint32_t cp;")
    lines.append("  uint8_t ccc;")
    lines.append("};")
    lines.append("")
    lines.append("struct ComposeEntry {")
    lines.append("  uint64_t key;  // (starter << 21) | combining")
    lines.append("  uint32_t composed;")
    lines.append("};")
    lines.append("")

    lines.append(f"inline constexpr DecompEntry kDecomp[{len(entries)}] = {{")
    for cp, off, ln in entries:
        lines.append(f"  {{0x{cp:X}, {off}, {ln}}},")
    lines.append("};")
    lines.append("")

    lines.append(f"inline constexpr uint32_t kDecompData[{len(flat)}] = {{")
    for i in range(0, len(flat), 8):
        chunk = ", ".join(f"0x{v:X}" for v in flat[i:i + 8])
        lines.append(f"  {chunk},")
    lines.append("};")
    lines.append("")

    ccc_items = sorted(ccc.items())
    lines.append(f"inline constexpr CccEntry kCcc[{len(ccc_items)}] = {{")
    for cp, k in ccc_items:
        lines.append(f"  {{0x{cp:X}, {k}}},")
    lines.append("};")
    lines.append("")

    comp_items = sorted((a << 21) | b for (a, b) in comp)
    comp_map = {(a << 21) | b: c for (a, b), c in comp.items()}
    lines.append(f"inline constexpr ComposeEntry kCompose[{len(comp_items)}]"
                 " = {")
    for key in comp_items:
        lines.append(f"  {{0x{key:X}, 0x{comp_map[key]:X}}},")
    lines.append("};")
    lines.append("")
    lines.append("}  // namespace nfc")
    lines.append("}  // namespace xltts")
    lines.append("")
    lines.append("#endif  // XLTTS_TEXT_NFC_DATA_H_")
    lines.append("")

    with open("src/text/nfc_data.h", "w", encoding="utf-8") as f:
        f.write("\n".join(lines))
    print(f"decomp entries: {len(entries)}  flat: {len(flat)}  "
          f"ccc: {len(ccc_items)}  compose: {len(comp_items)}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
