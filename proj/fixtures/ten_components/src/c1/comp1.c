extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig1 = 0;
int sig2 = 0;
extern int sig11;

int send1() {
    if (FA && !FB) {
        sig1 = sig1 + 1;
    }
    return 0;
}

int send2() {
    if (FA) {
        sig2 = sig2 + 1;
    }
    return 0;
}

int act11() {
    return 11;
}

int poll11() {
    if (sig11 > 0) {
        act11();
    }
    return 0;
}
