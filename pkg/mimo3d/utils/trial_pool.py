# mimo3d/utils/trial_pool.py
"""
    TrialPool

    Maps a picklable worker over index chunks with a multiprocessing.Pool and reassembles the
    results by index, so the output never depends on which process finished first. With a single
    worker everything runs in-process, which is what tests and small runs want.

    The worker receives (payload, indices) and must return one result per index, in the order the
    indices were given.

    Example usage:

        def simulate(payload, indices):
            return [payload.run(i) for i in indices]

        pool = TrialPool(workers=4)
        results = pool.map_indexed(simulate, payload, range(2000))
"""
import logging
from multiprocessing import Pool
from typing import Any, Callable, Iterable, Sequence

logger = logging.getLogger(__name__)

IndexedWorker = Callable[[Any, Sequence[int]], Sequence[Any]]


class TrialPoolError(Exception):
    pass


def _invoke(job: tuple[IndexedWorker, Any, list[int]]) -> tuple[list[int], Sequence[Any]]:
    worker, payload, indices = job
    return indices, worker(payload, indices)


class TrialPool:
    def __init__(self, workers: int = 1, chunks_per_worker: int = 4):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.workers: int = workers
        self.chunks_per_worker: int = chunks_per_worker

    def _chunk(self, indices: list[int]) -> list[list[int]]:
        """Split indices into contiguous chunks, roughly chunks_per_worker per worker.

        Args:
            indices (list[int]): Task indices, in output order.

        Returns:
            list[list[int]]: Non-empty contiguous chunks covering every index once.
        """
        n_chunks = max(1, min(len(indices), self.workers * self.chunks_per_worker))
        size, extra = divmod(len(indices), n_chunks)
        chunks = []
        start = 0
        for chunk_index in range(n_chunks):
            stop = start + size + (1 if chunk_index < extra else 0)
            if stop > start:
                chunks.append(indices[start:stop])
            start = stop
        return chunks

    def map_indexed(
        self, worker: IndexedWorker, payload: Any, indices: Iterable[int]
    ) -> list[Any]:
        """Run worker over all indices and return results in index order.

        Raises:
            TrialPoolError: If a worker returns the wrong number of results.
        """
        index_list = list(indices)
        if not index_list:
            return []

        if self.workers == 1:
            outcomes = [_invoke((worker, payload, index_list))]
        else:
            jobs = [(worker, payload, chunk) for chunk in self._chunk(index_list)]
            logger.debug(f"Dispatching {len(jobs)} chunks to {self.workers} processes.")
            with Pool(processes=self.workers) as pool:
                outcomes = pool.map(_invoke, jobs)

        by_index: dict[int, Any] = {}
        for chunk_indices, chunk_results in outcomes:
            if len(chunk_results) != len(chunk_indices):
                raise TrialPoolError(
                    f"worker returned {len(chunk_results)} results for {len(chunk_indices)} indices"
                )
            by_index.update(zip(chunk_indices, chunk_results))

        return [by_index[index] for index in index_list]
