"""
Byte-level BPE models and the encode/decode engine
==================================================

Builds the bundled synthetic tokenizer and walks through the byte
bijection, whole-token-priority encoding, and round-trip behavior.
"""

from retok import bijection_map, decode, decode_text, encode, validate_model
from retok.synthetic import base_model, byte_only_model

# The byte bijection maps every byte to a printable character so vocabulary
# files never contain raw whitespace or control bytes. A space becomes the
# word-boundary marker; the lead byte of most Indic characters is 0xE0.
bij = bijection_map()
print("space ->", repr(bij.forward[0x20]))
print("0xE0  ->", repr(bij.forward[0xE0]))
print("0xA4  ->", repr(bij.forward[0xA4]))

# The bundled base model is trained from a small multilingual corpus:
# Latin and Devanagari are covered with merges, CJK/Hangul/Greek tokens
# exist (they will matter in the crop and surgery demos), Odia does not.
model = base_model()
print(f"\nbase model: {model.size} tokens, {len(model.merges)} merge rules")
print("validation findings:", len(validate_model(model).findings))

# English composes into a handful of tokens.
seq = encode(model, "the people speak")
print("\nencode('the people speak') ->", seq.surfaces)

# A Devanagari word composes through byte-pair chains into char tokens.
seq = encode(model, "भाषा")
print("encode('भाषा')             ->", seq.surfaces, f"({len(seq)} tokens)")

# Odia has no coverage in the base: every 3-byte character costs 3 tokens.
seq = encode(model, "ଭାଷା")
print("encode('ଭାଷା')             ->", len(seq), "tokens (byte fallback)")

# Any byte input round-trips, including invalid UTF-8: the 256 single-byte
# tokens are the floor everything bottoms out on.
for data in (b"plain ascii", "तीन लिपियाँ ଏବଂ ଲିପି 123".encode(), b"\xff\xfe broken \xe0\xa4"):
    assert decode(model, encode(model, data)) == data
print("\nround-trip holds on text, mixed scripts, and invalid UTF-8")

# Special tokens are matched before segmentation and decode literally.
text = "turn one <|eos|> turn two"
print("\nwith specials:", encode(model, text).surfaces)
print("decodes back :", repr(decode_text(model, encode(model, text))))

# A merge-free model tokenizes every byte separately; token count == bytes.
floor = byte_only_model()
sample = "ନମସ୍କାର"
assert len(encode(floor, sample)) == len(sample.encode("utf-8"))
print(f"\nmerge-free floor: {len(sample.encode('utf-8'))} bytes -> "
      f"{len(encode(floor, sample))} tokens")
