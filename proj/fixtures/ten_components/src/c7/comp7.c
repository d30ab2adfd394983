extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig8 = 0;
extern int sig7;
extern int sig13;
extern int sig14;

int act7() {
    return 7;
}

int poll7() {
    if (FC) {
        if (sig7 > 0) {
            act7();
        }
    }
    return 0;
}

int send8() {
    if (!FB) {
        sig8 = sig8 + 1;
    }
    return 0;
}

int act13() {
    return 13;
}

int poll13() {
    if (sig13 > 0) {
        act13();
    }
    return 0;
}

int act14() {
    return 14;
}

int poll14() {
    if (FD) {
        if (sig14 > 0) {
            act14();
        }
    }
    return 0;
}
