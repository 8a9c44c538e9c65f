"""
Ternary ID codewords
====================

Each user turns a channel label into a ternary word: the delimiter ``200001``
followed by the 4B5B code of the label. The 2 marks the slot where the user
sits on its own ID channel.
"""
from qrendezvous.codec import codeword_length, make_codeword, verify_class, zero_run_count

# A 15-channel network needs 4-bit labels, hence 11-trit words
N = 15
L = (N - 1).bit_length()
print("M =", codeword_length(N))

for label in (0, 1, 6, 14):
    print(label, make_codeword(label, L))

# every rotation of a word has exactly one run of four zeros: the delimiter
w = make_codeword(6, L)
print("zero runs:", [zero_run_count(w.trits[d:] + w.trits[:d]) for d in range(w.M)])

# The whole family is checked pairwise at every shift. An empty report means
# the rotated words always expose a 1/0 or 1/1 pairing.
for L in (1, 4, 8):
    report = verify_class([make_codeword(x, L) for x in range(2**L)])
    print(f"L={L}: {2**L} words, violations={len(report.violations)}")

# two copies of the same word do not form a class
print(verify_class([w, w]).violations)
