"""GRU encoder-decoder with dot attention, sized for desk-scale corpora.

The encoder is bidirectional so the decoder's initial state carries a
summary of the whole input line — with near-duplicate inputs (daily
reports share most of their structure) a forward-only final state is not
enough to keep rows apart at decode time.
"""

from __future__ import annotations

import torch
from torch import nn

from .data import BOS, EOS, PAD


class Seq2Seq(nn.Module):
    def __init__(self, vocab_size: int, embed_dim: int = 128, hidden_dim: int = 256):
        super().__init__()
        if hidden_dim % 2:
            raise ValueError("hidden_dim must be even (bidirectional encoder)")
        self.vocab_size = vocab_size
        self.embed_dim = embed_dim
        self.hidden_dim = hidden_dim
        self.embedding = nn.Embedding(vocab_size, embed_dim, padding_idx=PAD)
        self.encoder = nn.GRU(embed_dim, hidden_dim // 2, batch_first=True, bidirectional=True)
        self.bridge = nn.Linear(hidden_dim, hidden_dim)
        self.decoder = nn.GRU(embed_dim, hidden_dim, batch_first=True)
        self.combine = nn.Linear(hidden_dim * 2, hidden_dim)
        self.out = nn.Linear(hidden_dim, vocab_size)

    def encode(self, src: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        embedded = self.embedding(src)
        outputs, hidden = self.encoder(embedded)
        # hidden: (2, batch, hidden//2) -> (1, batch, hidden)
        summary = torch.cat([hidden[0], hidden[1]], dim=-1).unsqueeze(0)
        return outputs, torch.tanh(self.bridge(summary))

    def _attend(
        self, dec_out: torch.Tensor, enc_out: torch.Tensor, src_mask: torch.Tensor
    ) -> torch.Tensor:
        # dot attention over encoder states, masked at padding
        scores = torch.bmm(dec_out, enc_out.transpose(1, 2))
        scores = scores.masked_fill(~src_mask.unsqueeze(1), float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        context = torch.bmm(weights, enc_out)
        fused = torch.tanh(self.combine(torch.cat([dec_out, context], dim=-1)))
        return self.out(fused)

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        """Teacher-forced logits for each target position."""
        enc_out, hidden = self.encode(src)
        src_mask = src != PAD
        dec_out, _ = self.decoder(self.embedding(tgt_in), hidden)
        return self._attend(dec_out, enc_out, src_mask)

    @torch.no_grad()
    def greedy_decode(self, src_ids: list[int], max_length: int = 256) -> list[int]:
        self.eval()
        src = torch.tensor([src_ids], dtype=torch.long)
        enc_out, hidden = self.encode(src)
        src_mask = src != PAD
        token = torch.tensor([[BOS]], dtype=torch.long)
        result: list[int] = []
        for _ in range(max_length):
            dec_out, hidden = self.decoder(self.embedding(token), hidden)
            logits = self._attend(dec_out, enc_out, src_mask)
            token = logits[:, -1:].argmax(dim=-1)
            token_id = int(token.item())
            if token_id == EOS:
                break
            result.append(token_id)
        return result
