"""Run-length table of the garbage character class, built from Python's
unicodedata and the cp1252 codec. Code points unassigned in this Python's
Unicode version are marked unknown and skipped by the test.

Usage: python3 garbage_class.py > tests/garbage_table.inc
"""
import sys
import unicodedata

cp1252 = set()
for b in range(0x80, 0xA0):
    try:
        cp1252.add(ord(bytes([b]).decode("cp1252")))
    except UnicodeDecodeError:
        pass

# UTF-8 lead bytes of 2-, 3- and 4-byte sequences common in mojibake, read as
# Latin-1, plus the capitals that lowercase onto them.
leads = set()
for b in (0xC2, 0xC3, 0xE0, 0xE2, 0xE3, 0xEF, 0xF0):
    ch = bytes([b]).decode("latin-1")
    leads.add(ord(ch))
    leads.add(ord(ch.upper()))


# General_Category changes between this Python's tables and the Unicode
# version the library links against (14.0): U+1734 HANUNOO SIGN PAMUDPOD
# moved from Mn to Mc.
RECATEGORIZED = {0x1734: "Mc"} if unicodedata.unidata_version.startswith("13.") else {}


def state(cp):
    if 0xD800 <= cp <= 0xDFFF:
        return 2
    cat = RECATEGORIZED.get(cp, unicodedata.category(chr(cp)))
    if cp in (0xFFFD, 0xFFFC) or 0x80 <= cp <= 0xBF or cp in cp1252 or cp in leads:
        return 1
    if cat == "Cn":
        return 2
    return 1 if cat in ("Cc", "Cf", "Mn", "Me") else 0


runs = []
cur = state(0)
start = 0
for cp in range(1, 0x110000):
    s = state(cp)
    if s != cur:
        runs.append((start, cp - 1, cur))
        start, cur = cp, s
runs.append((start, 0x10FFFF, cur))

print(f"// generated by tools/oracles/garbage_class.py, Unicode {unicodedata.unidata_version}")
print(f"// {len(cp1252)} cp1252 punctuation, {len(leads)} lead letters")
for lo, hi, s in runs:
    print(f"{{0x{lo:X}, 0x{hi:X}, {s}}},")
