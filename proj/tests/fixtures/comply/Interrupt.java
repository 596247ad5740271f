public class Interrupt {
    void stop() {
        Thread.currentThread().interrupt();
        LOG.info("The current thread is interrupted"); // (also add thread ID if available)
    }
}
