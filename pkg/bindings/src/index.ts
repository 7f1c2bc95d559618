/**
 * TypeScript bindings for the augkit augmentation service.
 *
 * An Augmenter wraps one server-side resource handle (embedding store +
 * stopwords + POS lexicon + config), created eagerly so bad paths or
 * malformed files fail at construction time. All calls are deterministic
 * under the seeds they are given; the service guarantees byte-identical
 * outputs to direct library calls with the same inputs.
 *
 * The service must be running, e.g.: `augkit serve --port 8000`.
 */

export interface AugmenterConfig {
  alpha?: number;
  nAug?: number;
  topK?: number;
  seed?: number;
  enabledOps?: string[];
  mode?: "per-op" | "composed";
  augmentLabels?: string[];
  minSimilarity?: number;
  tssrTag?: string;
}

export interface AugmenterOptions {
  /** Base URL of a running augkit service, e.g. http://127.0.0.1:8000 */
  baseUrl: string;
  embeddingsPath: string;
  stopwordsPath?: string;
  lexiconPath?: string;
  config?: AugmenterConfig;
}

export interface EddaVariant {
  text: string;
  op: string;
  noop: boolean;
}

export interface TssrVariant {
  text: string;
  noop: boolean;
}

export interface DevictionResult {
  similarity: number;
  verdict: "similar" | "dissimilar";
}

export interface CallOptions {
  /**
   * Record id used in per-variant RNG derivation (seed, record id, round,
   * op). Defaults to "0", which matches row 0 of a CLI-processed dataset;
   * set it to the row ordinal to reproduce CLI batch outputs exactly.
   */
  recordId?: string;
}

export interface HandleInfo {
  handleId: string;
  dim: number;
  vocabSize: number;
  stopwordCount: number;
  lexiconSize: number;
}

/** A data error reported by the service, carrying the native error name. */
export class AugkitServiceError extends Error {
  readonly errorName: string;
  readonly status: number;

  constructor(errorName: string, message: string, status: number) {
    super(`${errorName}: ${message}`);
    this.name = "AugkitServiceError";
    this.errorName = errorName;
    this.status = status;
  }
}

function configPayload(config: AugmenterConfig | undefined): Record<string, unknown> {
  if (!config) return {};
  const payload: Record<string, unknown> = {};
  if (config.alpha !== undefined) payload.alpha = config.alpha;
  if (config.nAug !== undefined) payload.n_aug = config.nAug;
  if (config.topK !== undefined) payload.top_k = config.topK;
  if (config.seed !== undefined) payload.seed = config.seed;
  if (config.enabledOps !== undefined) payload.enabled_ops = config.enabledOps;
  if (config.mode !== undefined) payload.mode = config.mode;
  if (config.augmentLabels !== undefined) payload.augment_labels = config.augmentLabels;
  if (config.minSimilarity !== undefined) payload.min_similarity = config.minSimilarity;
  if (config.tssrTag !== undefined) payload.tssr_tag = config.tssrTag;
  return payload;
}

async function request(
  baseUrl: string,
  method: string,
  path: string,
  body?: unknown
): Promise<any> {
  const response = await fetch(baseUrl.replace(/\/$/, "") + path, {
    method,
    headers: body === undefined ? undefined : { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (response.status === 204) return undefined;
  const payload: any = await response.json().catch(() => ({}));
  if (!response.ok) {
    const name = payload.error ?? `HTTP${response.status}`;
    const message = payload.message ?? JSON.stringify(payload.detail ?? payload);
    throw new AugkitServiceError(name, message, response.status);
  }
  return payload;
}

export class Augmenter {
  readonly info: HandleInfo;
  private readonly baseUrl: string;
  private closed = false;

  private constructor(baseUrl: string, info: HandleInfo) {
    this.baseUrl = baseUrl;
    this.info = info;
  }

  /** Load and validate all resources server-side; rejects on any bad input. */
  static async create(options: AugmenterOptions): Promise<Augmenter> {
    const body: Record<string, unknown> = {
      embeddings_path: options.embeddingsPath,
      config: configPayload(options.config),
    };
    if (options.stopwordsPath) body.stopwords_path = options.stopwordsPath;
    if (options.lexiconPath) body.lexicon_path = options.lexiconPath;
    const payload = await request(options.baseUrl, "POST", "/handles", body);
    return new Augmenter(options.baseUrl, {
      handleId: payload.handle_id,
      dim: payload.dim,
      vocabSize: payload.vocab_size,
      stopwordCount: payload.stopword_count,
      lexiconSize: payload.lexicon_size,
    });
  }

  /** All enabled edit operations applied to one sentence. */
  async edda(text: string, label: string, seed: number, opts?: CallOptions): Promise<EddaVariant[]> {
    const payload = await request(this.baseUrl, "POST", `/handles/${this.info.handleId}/edda`, {
      text,
      label,
      seed,
      record_id: opts?.recordId ?? "0",
    });
    return payload.variants.map((v: any) => ({ text: v.text, op: v.op, noop: v.noop }));
  }

  /** n tag-constrained single-token replacements; noop variants keep n exact. */
  async tssr(
    text: string,
    label: string,
    tag: string | null,
    n: number,
    seed: number,
    opts?: CallOptions
  ): Promise<TssrVariant[]> {
    const payload = await request(this.baseUrl, "POST", `/handles/${this.info.handleId}/tssr`, {
      text,
      label,
      tag,
      n,
      seed,
      record_id: opts?.recordId ?? "0",
    });
    return payload.variants.map((v: any) => ({ text: v.text, noop: v.noop }));
  }

  /** Cosine-similarity verdict between two sentences (similar iff >= delta). */
  async deviction(textA: string, textB: string, delta = 0.9): Promise<DevictionResult> {
    const payload = await request(this.baseUrl, "POST", `/handles/${this.info.handleId}/deviction`, {
      text_a: textA,
      text_b: textB,
      delta,
    });
    return { similarity: payload.similarity, verdict: payload.verdict };
  }

  /** Release the server-side handle. Further calls will fail with UnknownHandle. */
  async close(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    await request(this.baseUrl, "DELETE", `/handles/${this.info.handleId}`);
  }
}
