/* Compiled as C: the public header must be usable without a C++ compiler. */
#include <tfpr/tfpr.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#define EXPECT(cond)                                                          \
    do                                                                        \
    {                                                                         \
        if (!(cond))                                                          \
        {                                                                     \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,    \
                    tfpr_last_error());                                       \
            return 1;                                                         \
        }                                                                     \
    } while (0)

int main(void)
{
    enum { L = 4096 };
    double* x = malloc(L * sizeof *x);
    size_t i;
    unsigned seed = 12345u;
    for (i = 0; i < L; ++i)
    {
        seed = seed * 1103515245u + 12345u;
        x[i] = (double)(seed >> 8) / 16777216.0 - 0.5;
    }

    tfpr_signal* s = NULL;
    EXPECT(tfpr_signal_create(x, L, 22050, &s) == TFPR_OK);
    EXPECT(tfpr_signal_length(s) == L);

    tfpr_frame* f = NULL;
    EXPECT(tfpr_frame_create("gauss", 0.0, 32, 256, L, 22050, &f) == TFPR_OK);
    EXPECT(fabs(tfpr_frame_lambda(f) - 32.0 * 256.0 / 22050.0) < 1e-15);

    tfpr_coeffs* c = NULL;
    EXPECT(tfpr_stft(f, s, &c) == TFPR_OK);
    EXPECT(tfpr_coeffs_channels(c) == 129);
    EXPECT(tfpr_coeffs_frames(c) == L / 32);

    tfpr_signal* back = NULL;
    EXPECT(tfpr_istft(f, c, &back) == TFPR_OK);
    {
        const double* y = tfpr_signal_data(back);
        double num = 0, den = 0;
        for (i = 0; i < L; ++i)
        {
            num += (y[i] - x[i]) * (y[i] - x[i]);
            den += x[i] * x[i];
        }
        EXPECT(sqrt(num / den) <= 1e-10);
    }

    {
        tfpr_signal* r = NULL;
        double snr = 0;
        EXPECT(tfpr_reconstruct(f, c, "pghi", NULL, &r) == TFPR_OK);
        EXPECT(tfpr_snr_ms(s, r, 256, &snr) == TFPR_OK);
        EXPECT(isfinite(snr));
        tfpr_signal_destroy(r);
    }

    /* failures report a status and a message, and leave outputs alone */
    {
        tfpr_frame* bad = NULL;
        EXPECT(tfpr_frame_create("gauss", 1.0, 33, 256, L, 22050, &bad) != TFPR_OK);
        EXPECT(bad == NULL);
        EXPECT(tfpr_last_error()[0] != '\0');
        EXPECT(tfpr_frame_create("triangle", 1.0, 32, 256, L, 22050, &bad) == TFPR_INVALID_ARGUMENT);
        EXPECT(tfpr_signal_read_wav("/nonexistent/x.wav", 22050, 0, &s) == TFPR_IO);
    }

    tfpr_signal_destroy(back);
    tfpr_coeffs_destroy(c);
    tfpr_frame_destroy(f);
    tfpr_signal_destroy(s);
    tfpr_signal_destroy(NULL);
    free(x);
    printf("capi smoke ok\n");
    return 0;
}
