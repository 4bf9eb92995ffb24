#!/usr/bin/env python3
"""Minimal model server behind the wpgen neural adapters.

Serves four endpoints over plain HTTP:

    POST /infill {left, right, nucleus, temperature, max_new_tokens, seed} -> {text}
    POST /nli    {premise, hypothesis} -> {entailment, neutral, contradiction}
    POST /nsp    {first, second}       -> {is_next}
    POST /embed  {sentence}            -> {vector}

Checkpoint paths come from the environment (or flags):

    WPGEN_INFILL_MODEL  causal LM fine-tuned for sentence infilling
                        (prompt layout: left <mask> right <sep> answer)
    WPGEN_NLI_MODEL     sequence classifier with entailment/neutral/contradiction labels
    WPGEN_NSP_MODEL     BERT-style model with a next-sentence-prediction head
    WPGEN_EMBED_MODEL   sentence-transformers embedding model

Example:

    pip install transformers torch sentence-transformers fastapi uvicorn
    WPGEN_NLI_MODEL=microsoft/deberta-large-mnli \
    WPGEN_EMBED_MODEL=sentence-transformers/all-mpnet-base-v2 \
    python scripts/serve_models.py --port 8000

Endpoints whose model is not configured respond 503; the C++ side reports
those as scorer failures. Class-index conventions (which logit is
"entailment", which NSP class means "is next") are resolved here from the
model config, so the C++ adapters always receive the accept-class
probability.
"""

import argparse
import os
from functools import lru_cache

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

app = FastAPI(title="wpgen model server")

INFILL_MASK = "<|infill|>"
INFILL_SEP = "<|sep|>"


def _model_path(name: str) -> str | None:
    value = os.environ.get(name, "").strip()
    return value or None


@lru_cache(maxsize=1)
def infill_pipeline():
    path = _model_path("WPGEN_INFILL_MODEL")
    if path is None:
        return None
    import torch
    from transformers import AutoModelForCausalLM, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(path)
    model = AutoModelForCausalLM.from_pretrained(path)
    model.eval()
    return tokenizer, model, torch


@lru_cache(maxsize=1)
def nli_pipeline():
    path = _model_path("WPGEN_NLI_MODEL")
    if path is None:
        return None
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(path)
    model = AutoModelForSequenceClassification.from_pretrained(path)
    model.eval()
    # map label names to the three classes, falling back to the common
    # (contradiction, neutral, entailment) order
    labels = {v.lower(): k for k, v in model.config.id2label.items()}
    index = {
        "entailment": labels.get("entailment", 2),
        "neutral": labels.get("neutral", 1),
        "contradiction": labels.get("contradiction", 0),
    }
    return tokenizer, model, torch, index


@lru_cache(maxsize=1)
def nsp_pipeline():
    path = _model_path("WPGEN_NSP_MODEL")
    if path is None:
        return None
    import torch
    from transformers import AutoTokenizer, BertForNextSentencePrediction

    tokenizer = AutoTokenizer.from_pretrained(path)
    model = BertForNextSentencePrediction.from_pretrained(path)
    model.eval()
    return tokenizer, model, torch


@lru_cache(maxsize=1)
def embed_pipeline():
    path = _model_path("WPGEN_EMBED_MODEL")
    if path is None:
        return None
    from sentence_transformers import SentenceTransformer

    return SentenceTransformer(path)


class InfillRequest(BaseModel):
    left: str = ""
    right: str = ""
    nucleus: float = 0.5
    temperature: float = 1.0
    max_new_tokens: int = 40
    seed: int = 0


class NliRequest(BaseModel):
    premise: str
    hypothesis: str


class NspRequest(BaseModel):
    first: str
    second: str


class EmbedRequest(BaseModel):
    sentence: str


@app.post("/infill")
def infill(req: InfillRequest):
    bundle = infill_pipeline()
    if bundle is None:
        raise HTTPException(503, "WPGEN_INFILL_MODEL not configured")
    tokenizer, model, torch = bundle
    prompt = f"{req.left} {INFILL_MASK} {req.right} {INFILL_SEP}"
    inputs = tokenizer(prompt, return_tensors="pt")
    torch.manual_seed(req.seed & 0x7FFFFFFF)
    with torch.no_grad():
        output = model.generate(
            **inputs,
            do_sample=True,
            top_p=req.nucleus,
            temperature=req.temperature,
            max_new_tokens=req.max_new_tokens,
            pad_token_id=tokenizer.eos_token_id,
        )
    text = tokenizer.decode(output[0][inputs["input_ids"].shape[1]:], skip_special_tokens=True)
    return {"text": text.strip()}


@app.post("/nli")
def nli(req: NliRequest):
    bundle = nli_pipeline()
    if bundle is None:
        raise HTTPException(503, "WPGEN_NLI_MODEL not configured")
    tokenizer, model, torch, index = bundle
    inputs = tokenizer(req.premise, req.hypothesis, return_tensors="pt", truncation=True)
    with torch.no_grad():
        probs = model(**inputs).logits[0].softmax(dim=0)
    return {
        "entailment": probs[index["entailment"]].item(),
        "neutral": probs[index["neutral"]].item(),
        "contradiction": probs[index["contradiction"]].item(),
    }


@app.post("/nsp")
def nsp(req: NspRequest):
    bundle = nsp_pipeline()
    if bundle is None:
        raise HTTPException(503, "WPGEN_NSP_MODEL not configured")
    tokenizer, model, torch = bundle
    inputs = tokenizer(req.first, req.second, return_tensors="pt", truncation=True)
    with torch.no_grad():
        probs = model(**inputs).logits[0].softmax(dim=0)
    # BertForNextSentencePrediction: class 0 is "is next"
    return {"is_next": probs[0].item()}


@app.post("/embed")
def embed(req: EmbedRequest):
    model = embed_pipeline()
    if model is None:
        raise HTTPException(503, "WPGEN_EMBED_MODEL not configured")
    vector = model.encode(req.sentence)
    return {"vector": [float(x) for x in vector]}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args()

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
