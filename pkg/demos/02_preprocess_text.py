"""Turn comments and identifiers into token sequences.

Comments lose stopwords; identifiers keep them.

Run: python demos/02_preprocess_text.py
"""
from sigtype.nlp import normalize_text, preprocess_comment, preprocess_identifier, split_identifier

print(normalize_text("object.property"))
print(split_identifier("parseJSONResponse"))
print(preprocess_comment("Returns the number of removed items.").tokens)
print(preprocess_identifier("is_removedFile").tokens)
